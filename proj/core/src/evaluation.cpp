#include "scalelab/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "scalelab/presets.hpp"
#include "scalelab/rng.hpp"

namespace scalelab::evaluation {

double mre(std::span<const double> predicted,
           std::span<const double> observed) {
  if (predicted.size() != observed.size() || predicted.empty())
    throw std::invalid_argument("mre: mismatched or empty inputs");
  double s = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (observed[i] == 0) throw std::invalid_argument("mre: zero observation");
    s += std::abs(predicted[i] - observed[i]) / std::abs(observed[i]);
  }
  return s / static_cast<double>(predicted.size());
}

BootstrapResult bootstrap_mre(LawFamily f, const FitDataset& dataset,
                              const FitConfig& fit_config,
                              const BootstrapConfig& config,
                              const L0Table* l0) {
  const auto& records = dataset.records;
  if (records.empty())
    throw std::invalid_argument("bootstrap_mre: empty dataset");
  size_t n = records.size();
  size_t k = config.resample_size.value_or(n);

  std::vector<double> observed = fitting::observed_batch(f, records, l0);

  BootstrapResult out;
  out.note = "per-repetition fits are scored against the full original "
             "dataset (in-sample)";
  for (int rep = 0; rep < config.repetitions; ++rep) {
    rng::SubStream stream(config.seed, "bootstrap",
                          static_cast<uint64_t>(rep));
    std::vector<RunRecord> sample;
    sample.reserve(k);
    for (size_t j = 0; j < k; ++j)
      sample.push_back(records[stream.bounded(n)]);
    try {
      fitting::FitResult fr = fitting::fit(f, sample, fit_config, l0);
      std::vector<double> pred =
          fitting::predict_batch(f, fr.params, records, l0);
      out.per_rep.push_back(mre(pred, observed));
    } catch (const fitting::FitFailure&) {
      ++out.failed_reps;
    }
  }
  if (out.per_rep.empty())
    throw fitting::FitFailure("bootstrap_mre: every repetition failed");
  double s = 0;
  for (double v : out.per_rep) s += v;
  out.mean_mre = s / static_cast<double>(out.per_rep.size());
  return out;
}

ExtrapolationSetup setup_A() {
  return {"A", {"XL"}, {30000000}};
}

ExtrapolationSetup setup_B() {
  return {"B", {"Large", "XL"}, {9000000, 30000000}};
}

double extrapolation_mre(LawFamily f, const FitDataset& dataset,
                         const ExtrapolationSetup& setup,
                         const FitConfig& fit_config, const L0Table* l0) {
  std::set<uint64_t> excluded_params;
  for (const std::string& name : setup.excluded_model_sizes) {
    const ModelSpec* m = presets::find_model(name);
    if (!m)
      throw std::invalid_argument("extrapolation_mre: unknown model size '" +
                                  name + "'");
    excluded_params.insert(m->n_params);
  }
  std::set<uint64_t> excluded_tokens(setup.excluded_token_counts.begin(),
                                     setup.excluded_token_counts.end());

  std::vector<RunRecord> train, held_out;
  for (const RunRecord& r : dataset.records) {
    if (excluded_params.count(r.n_params) ||
        excluded_tokens.count(r.dft_tokens))
      held_out.push_back(r);
    else
      train.push_back(r);
  }
  if (train.empty() || held_out.empty())
    throw std::invalid_argument(
        "extrapolation_mre: exclusion leaves an empty split");

  fitting::FitResult fr = fitting::fit(f, train, fit_config, l0);
  std::vector<double> pred =
      fitting::predict_batch(f, fr.params, held_out, l0);
  std::vector<double> obs = fitting::observed_batch(f, held_out, l0);
  return mre(pred, obs);
}

UcurveBottom ucurve_bottom(std::span<const uint64_t> steps,
                           std::span<const double> losses) {
  size_t n = steps.size();
  if (n == 0 || losses.size() != n)
    throw std::invalid_argument("ucurve_bottom: empty or mismatched series");
  if (n == 1) return {steps[0], losses[0], false};

  bool decreasing = true;
  for (size_t i = 0; i + 1 < n; ++i)
    if (!(losses[i + 1] < losses[i])) {
      decreasing = false;
      break;
    }
  if (decreasing) return {steps[n - 1], losses[n - 1], true};

  // Centered moving median; the window shrinks symmetrically at the ends.
  std::vector<double> smoothed(n);
  std::vector<double> window;
  for (size_t i = 0; i < n; ++i) {
    size_t rad = std::min<size_t>(2, std::min(i, n - 1 - i));
    window.assign(losses.begin() + (i - rad), losses.begin() + (i + rad + 1));
    std::sort(window.begin(), window.end());
    smoothed[i] = window[rad];
  }

  size_t best = 0;
  for (size_t i = 1; i < n; ++i) {
    if (smoothed[i] < smoothed[best] ||
        (smoothed[i] == smoothed[best] && losses[i] < losses[best]))
      best = i;
  }
  return {steps[best], losses[best], false};
}

ProgressLost progress_lost(double pt_loss_after,
                           std::span<const uint64_t> steps,
                           std::span<const double> losses) {
  size_t n = steps.size();
  if (n < 2 || losses.size() != n)
    throw std::invalid_argument("progress_lost: need at least two points");

  // Running-minimum envelope makes the curve nonincreasing.
  std::vector<double> env(n);
  env[0] = losses[0];
  for (size_t i = 1; i < n; ++i) env[i] = std::min(env[i - 1], losses[i]);

  // Exact hits on the endpoints are in range, not clamped.
  if (pt_loss_after >= env[0]) return {1.0, pt_loss_after > env[0], false};
  if (pt_loss_after <= env[n - 1])
    return {0.0, false, pt_loss_after < env[n - 1]};

  // Earliest index where the envelope reaches the target, then linear
  // interpolation inside that segment.
  size_t i = 1;
  while (env[i] > pt_loss_after) ++i;
  double s0 = static_cast<double>(steps[i - 1]);
  double s1 = static_cast<double>(steps[i]);
  double t_star =
      s0 + (s1 - s0) * (env[i - 1] - pt_loss_after) / (env[i - 1] - env[i]);
  double total = static_cast<double>(steps[n - 1]);
  if (total <= 0) throw std::invalid_argument("progress_lost: zero-length run");
  return {1.0 - t_star / total, false, false};
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("inverse_normal_cdf: p must be in (0, 1)");

  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against the exact CDF.
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

ZTestResult two_proportion_ztest(double acc_a, uint64_t n_a, double acc_b,
                                 uint64_t n_b, double level) {
  if (!(acc_a >= 0 && acc_a <= 1) || !(acc_b >= 0 && acc_b <= 1))
    throw std::invalid_argument("two_proportion_ztest: accuracies in [0, 1]");
  if (n_a == 0 || n_b == 0)
    throw std::invalid_argument("two_proportion_ztest: empty sample");
  if (!(level > 0 && level < 1))
    throw std::invalid_argument("two_proportion_ztest: level in (0, 1)");

  double na = static_cast<double>(n_a), nb = static_cast<double>(n_b);
  double pooled = (acc_a * na + acc_b * nb) / (na + nb);
  double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));

  ZTestResult out;
  out.z = se > 0 ? (acc_a - acc_b) / se : 0.0;
  double critical =
      level == 0.99 ? 2.5758 : inverse_normal_cdf(1.0 - (1.0 - level) / 2.0);
  out.significant = std::abs(out.z) > critical;
  out.delta_points = (acc_a - acc_b) * 100.0;
  return out;
}

} // namespace scalelab::evaluation
