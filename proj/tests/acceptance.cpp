// Acceptance gate: each criterion prints one [PASS]/[FAIL] line with the
// measured quantities and wall time. Run with a criterion number 1..14,
// or with no argument for the full sweep.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scalelab/datapipe.hpp"
#include "scalelab/evaluation.hpp"
#include "scalelab/fitting.hpp"
#include "scalelab/flops.hpp"
#include "scalelab/io.hpp"
#include "scalelab/laws.hpp"
#include "scalelab/optimizers.hpp"
#include "scalelab/presets.hpp"
#include "scalelab/rng.hpp"
#include "scalelab/surrogate.hpp"

using namespace scalelab;
using laws::Covariates;
using laws::LawFamily;
using laws::LawParams;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr std::array<LawFamily, 6> kFamilies = {
    LawFamily::additive_nd,        LawFamily::multiplicative_ft,
    LawFamily::forgetting_mult,    LawFamily::forgetting_kappa,
    LawFamily::forgetting_additive_delta,
    LawFamily::forgetting_no_base};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Scoped single-thread cap for the criteria with one-core runtime bounds.
struct ThreadCap {
  std::optional<std::string> saved;
  ThreadCap() {
    if (const char* v = std::getenv("SCALELAB_THREADS")) saved = v;
    setenv("SCALELAB_THREADS", "1", 1);
  }
  ~ThreadCap() {
    if (saved)
      setenv("SCALELAB_THREADS", saved->c_str(), 1);
    else
      unsetenv("SCALELAB_THREADS");
  }
};

double uniform_in(rng::SubStream& s, double lo, double hi) {
  return lo + (hi - lo) * s.uniform();
}

bool uses_p(LawFamily f) {
  return f == LawFamily::forgetting_mult || f == LawFamily::forgetting_kappa ||
         f == LawFamily::forgetting_no_base;
}

LawParams draw_params(LawFamily f, rng::SubStream& s) {
  LawParams q;
  q.A = std::exp(uniform_in(s, -4, 8));
  q.B = std::exp(uniform_in(s, -4, 8));
  q.E = std::exp(uniform_in(s, -4, 8));
  q.alpha = uniform_in(s, 1e-3, 2);
  q.beta = uniform_in(s, 1e-3, 2);
  q.kappa = uniform_in(s, 1e-3, 2);
  if (laws::needs_l0(f)) q.l0_pt = uniform_in(s, 2, 3.5);
  return q;
}

Covariates draw_cov(LawFamily f, rng::SubStream& s) {
  Covariates c;
  c.n_params = std::exp(uniform_in(s, std::log(1e6), std::log(2e9)));
  c.dft_tokens = std::exp(uniform_in(s, std::log(1e5), std::log(1e8)));
  c.p = uses_p(f) ? uniform_in(s, 0, 0.06) : 0.0;
  return c;
}

double in_sample_mre(LawFamily f, const FitDataset& data, const L0Table* l0) {
  fitting::FitResult fr = fitting::fit(f, data.records,
                                       fitting::default_fit_config(), l0);
  auto pred = fitting::predict_batch(f, fr.params, data.records, l0);
  auto obs = fitting::observed_batch(f, data.records, l0);
  return evaluation::mre(pred, obs);
}

// ---------------------------------------------------------------------

Outcome criterion_1() {
  const auto* arxiv = presets::find_domain("arxiv");
  if (!arxiv) return {false, "arxiv preset missing"};

  LawParams fg = arxiv->fg;
  fg.l0_pt = 3.19; // rewarmed Tiny baseline
  Covariates tiny{41000000, 300000, 0.01};
  double got = laws::eval_law(LawFamily::forgetting_mult, fg, tiny);
  const double want = 3.2173963521995783; // hand-computed anchor value
  double rel = std::abs(got - want) / want;

  size_t n_domains = presets::builtin_domains().size();
  size_t evaluated = 0;
  for (const auto& d : presets::builtin_domains()) {
    LawParams q = d.fg;
    q.l0_pt = 3.19;
    double pt = laws::eval_law(LawFamily::forgetting_mult, q, tiny);
    double ft = laws::eval_law(LawFamily::multiplicative_ft, d.ft, tiny);
    if (std::isfinite(pt) && std::isfinite(ft) && pt > 0 && ft > 0)
      ++evaluated;
  }

  bool pass = rel <= 1e-9 && n_domains == 12 && evaluated == 12;
  return {pass, "anchored eval " + fmt(got) + " rel_err " + fmt(rel) + ", " +
                    std::to_string(evaluated) + "/12 domains evaluate"};
}

Outcome criterion_2() {
  ThreadCap cap;
  std::ostringstream detail;
  bool pass = true;
  const L0Table& l0 = presets::builtin_l0_table();
  auto spec = surrogate::make_surrogate_spec(*presets::find_domain("arxiv"),
                                             0.0, 0);
  FitDataset data = surrogate::gen_grid(spec);

  for (LawFamily f : {LawFamily::multiplicative_ft,
                      LawFamily::forgetting_mult}) {
    auto t0 = std::chrono::steady_clock::now();
    double err = in_sample_mre(f, data, laws::needs_l0(f) ? &l0 : nullptr);
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    pass = pass && err <= 1e-6 && secs < 30.0;
    detail << laws::family_tag(f) << " mre " << fmt(err) << " in "
           << fmt(secs) << "s; ";
  }
  return {pass, detail.str()};
}

Outcome criterion_3() {
  ThreadCap cap;
  auto spec = surrogate::make_surrogate_spec(*presets::find_domain("arxiv"),
                                             0.005, 42);
  FitDataset data = surrogate::gen_grid(spec);

  evaluation::BootstrapConfig cfg;
  cfg.repetitions = 128;
  cfg.seed = 42;
  cfg.resample_size = 125;

  auto t0 = std::chrono::steady_clock::now();
  auto boot = evaluation::bootstrap_mre(LawFamily::multiplicative_ft, data,
                                        fitting::default_fit_config(), cfg);
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  bool pass = boot.mean_mre >= 0.001 && boot.mean_mre <= 0.015 &&
              boot.failed_reps == 0 && secs < 600.0;
  return {pass, "mean mre " + fmt(boot.mean_mre) + " over 128 reps in " +
                    fmt(secs) + "s single-threaded"};
}

Outcome criterion_4() {
  const L0Table& l0 = presets::builtin_l0_table();
  std::ostringstream detail;
  bool pass = true;
  for (LawFamily f : {LawFamily::multiplicative_ft,
                      LawFamily::forgetting_mult}) {
    for (const auto& setup : {evaluation::setup_A(), evaluation::setup_B()}) {
      std::vector<double> errs;
      for (uint64_t seed = 0; seed < 5; ++seed) {
        auto spec = surrogate::make_surrogate_spec(
            *presets::find_domain("arxiv"), 0.005, seed);
        FitDataset data = surrogate::gen_grid(spec);
        errs.push_back(evaluation::extrapolation_mre(
            f, data, setup, fitting::default_fit_config(),
            laws::needs_l0(f) ? &l0 : nullptr));
      }
      std::sort(errs.begin(), errs.end());
      double median = errs[2];
      pass = pass && median <= 0.025;
      detail << laws::family_tag(f) << "/" << setup.name << " median "
             << fmt(median) << "; ";
    }
  }
  return {pass, detail.str()};
}

Outcome criterion_5() {
  double h0 = fitting::huber(0.0, 1e-4);
  double h_half = fitting::huber(5e-5, 1e-4);
  double h_one = fitting::huber(1.0, 1e-4);
  double tail = 1e-4 * (1.0 - 5e-5); // delta * (|r| - delta/2) at r = 1
  bool huber_ok = h0 == 0.0 && std::abs(h_half - 1.25e-9) <= 1e-15 &&
                  std::abs(h_one - tail) <= 1e-15;

  double worst = 0;
  int checked = 0;
  rng::SubStream s(5, "lse-identity", 0);
  for (int i = 0; i < 10000; ++i) {
    LawFamily f = kFamilies[i % kFamilies.size()];
    LawParams q = draw_params(f, s);
    Covariates c = draw_cov(f, s);
    double direct = laws::eval_law(f, q, c);
    laws::LogEval le = laws::log_space_eval(f, q, c);
    if (le.empty) continue;
    double rel = std::abs(std::exp(le.value) - direct) / direct;
    worst = std::max(worst, rel);
    ++checked;
  }
  bool pass = huber_ok && worst <= 1e-12 && checked == 10000;
  return {pass, "huber branch values exact, lse worst rel " + fmt(worst) +
                    " over " + std::to_string(checked) + " cases"};
}

Outcome criterion_6() {
  // Step sized for the fourth-order stencil: truncation stays near 1e-8
  // while subtractive roundoff on large law values stays under the
  // comparison tolerance.
  const double h = 1e-3;
  double worst = 0;
  int failures = 0;
  rng::SubStream s(6, "gradcheck", 0);
  for (int i = 0; i < 1000; ++i) {
    LawFamily f = kFamilies[i % kFamilies.size()];
    LawParams q = draw_params(f, s);
    Covariates c = draw_cov(f, s);
    double f0 = laws::eval_law(f, q, c);

    std::vector<double> x = laws::pack_params(f, q);
    std::vector<double> an(x.size());
    laws::grad_law(f, q, c, an);

    auto shifted = [&](size_t j, double dx) {
      std::vector<double> y = x;
      y[j] += dx;
      return laws::eval_law(f, laws::unpack_params(f, y, q.l0_pt), c);
    };
    for (size_t j = 0; j < x.size(); ++j) {
      // Fourth-order central stencil keeps truncation error well below
      // the comparison tolerance.
      double fd = (8 * (shifted(j, h) - shifted(j, -h)) -
                   (shifted(j, 2 * h) - shifted(j, -2 * h))) /
                  (12 * h);
      double den = std::max({std::abs(an[j]), std::abs(fd),
                             1e-7 * (1.0 + std::abs(f0))});
      double rel = std::abs(an[j] - fd) / den;
      worst = std::max(worst, rel);
      if (rel > 1e-5) ++failures;
    }
  }
  bool pass = failures == 0;
  return {pass, "worst rel " + fmt(worst) + ", " + std::to_string(failures) +
                    " coordinate failures over 1000 draws"};
}

Outcome criterion_7() {
  auto t0 = std::chrono::steady_clock::now();
  datapipe::DomainStream ft{"ft", {{1}, {2}}, std::nullopt,
                            datapipe::CyclePolicy::repeat_epochs};
  datapipe::DomainStream pt{"pt", {{3}, {4}, {5}}, std::nullopt,
                            datapipe::CyclePolicy::repeat_epochs};

  bool endpoints = true;
  for (const auto& pk : datapipe::sample_mixture(ft, pt, 0.0, 11, 10000))
    endpoints = endpoints && pk.source == 0;
  for (const auto& pk : datapipe::sample_mixture(ft, pt, 1.0, 11, 10000))
    endpoints = endpoints && pk.source == 1;

  const double p = 0.01;
  const uint64_t n = 1000000;
  auto picks = datapipe::sample_mixture(ft, pt, p, 42, n);
  uint64_t hits = 0;
  for (const auto& pk : picks) hits += pk.source == 1;
  double fraction = static_cast<double>(hits) / static_cast<double>(n);
  double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
  bool in_band = fraction >= p - 3 * sigma && fraction <= p + 3 * sigma;

  datapipe::write_mixture_manifest("acc7_a.csv", picks);
  auto replay = datapipe::read_mixture_manifest("acc7_a.csv");
  datapipe::write_mixture_manifest("acc7_b.csv", replay);
  bool byte_exact =
      io::read_file("acc7_a.csv") == io::read_file("acc7_b.csv");
  std::remove("acc7_a.csv");
  std::remove("acc7_b.csv");

  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  bool pass = endpoints && in_band && byte_exact && secs < 5.0;
  return {pass, "endpoints exact, fraction " + fmt(fraction) + " in 3-sigma " +
                    "band, replay byte-exact, " + fmt(secs) + "s"};
}

Outcome criterion_8() {
  auto split = datapipe::tokens_seen(0.01, 1800, 32, 1024);
  bool tokens_ok = split.pt == 589824;

  // Printed training-cost table entries, three significant figures.
  const std::array<double, 5> printed = {1.25e18, 7.84e18, 6.61e19, 2.63e20,
                                         7.62e20};
  auto models = presets::builtin_models();
  bool flops_ok = models.size() == printed.size();
  double worst = 0;
  for (size_t i = 0; i < models.size() && flops_ok; ++i) {
    double got = u128_to_double(
        flops_train(models[i].n_params, models[i].pretrain_tokens));
    double rel = std::abs(got - printed[i]) / printed[i];
    worst = std::max(worst, rel);
    flops_ok = rel <= 5e-3;
  }
  bool pass = tokens_ok && flops_ok;
  return {pass, "pt tokens " + std::to_string(split.pt) +
                    ", training-cost worst rel " + fmt(worst)};
}

Outcome criterion_9() {
  auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  for (uint32_t v = 0; v < 65536; ++v) {
    auto [id, masked] = datapipe::unpack_masked(static_cast<uint16_t>(v));
    if (datapipe::pack_masked(id, masked) != v) pass = false;
  }
  for (uint32_t id = 0; id < 32768; ++id) {
    auto [i0, m0] = datapipe::unpack_masked(
        datapipe::pack_masked(static_cast<uint16_t>(id), false));
    auto [i1, m1] = datapipe::unpack_masked(
        datapipe::pack_masked(static_cast<uint16_t>(id), true));
    if (i0 != id || m0 || i1 != id || !m1) pass = false;
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  pass = pass && secs < 1.0;
  return {pass, "65536 values round-trip in " + fmt(secs) + "s"};
}

// Reference bottom finder used by criteria 10; mirrors the documented
// smoothing and tie rules with an independent direct implementation.
evaluation::UcurveBottom ref_bottom(const std::vector<uint64_t>& steps,
                                    const std::vector<double>& losses) {
  size_t n = losses.size();
  bool decreasing = true;
  for (size_t i = 0; i + 1 < n; ++i)
    if (!(losses[i + 1] < losses[i])) decreasing = false;
  if (decreasing) return {steps[n - 1], losses[n - 1], true};
  std::vector<double> sm(n);
  for (size_t i = 0; i < n; ++i) {
    size_t r = std::min({i, n - 1 - i, size_t{2}});
    std::vector<double> w(losses.begin() + (i - r),
                          losses.begin() + (i + r + 1));
    std::sort(w.begin(), w.end());
    sm[i] = w[w.size() / 2];
  }
  size_t best = 0;
  for (size_t i = 1; i < n; ++i)
    if (sm[i] < sm[best] || (sm[i] == sm[best] && losses[i] < losses[best]))
      best = i;
  return {steps[best], losses[best], false};
}

Outcome criterion_10() {
  std::vector<uint64_t> psteps;
  std::vector<double> plosses;
  for (int i = 0; i <= 10; ++i) {
    psteps.push_back(i);
    plosses.push_back(1.0 + 0.25 * (i - 5) * (i - 5));
  }
  auto parabola = evaluation::ucurve_bottom(psteps, plosses);
  bool parabola_ok = parabola.step == 5 && parabola.loss == 1.0;

  std::vector<uint64_t> steps{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> spike{26, 17, 10, 10, 5, 2, 5, 10, 10, 17, 26};
  auto got = evaluation::ucurve_bottom(steps, spike);
  auto want = ref_bottom(steps, spike);
  bool spike_ok = got.step == want.step && got.loss == want.loss;

  rng::SubStream s(10, "ucurve-acc", 0);
  for (int rep = 0; rep < 50 && spike_ok; ++rep) {
    size_t n = 5 + s.bounded(40);
    std::vector<uint64_t> st;
    std::vector<double> ls;
    for (size_t i = 0; i < n; ++i) {
      st.push_back(i);
      ls.push_back(1.0 + 0.5 * static_cast<double>(s.bounded(9)));
    }
    auto a = evaluation::ucurve_bottom(st, ls);
    auto b = ref_bottom(st, ls);
    spike_ok = a.step == b.step && a.loss == b.loss &&
               a.no_overfitting == b.no_overfitting;
  }

  surrogate::CurveShape shape;
  auto curve = surrogate::gen_curve(shape, 3.19, 3.63);
  auto bottom = evaluation::ucurve_bottom(curve.steps, curve.val_ft);
  double t_star = surrogate::analytic_bottom_step(shape);
  double miss = std::abs(static_cast<double>(bottom.step) - t_star);
  bool closed_ok = miss <= static_cast<double>(shape.log_every);

  bool pass = parabola_ok && spike_ok && closed_ok;
  return {pass, "parabola (" + std::to_string(parabola.step) + ", " +
                    fmt(parabola.loss) + "), oracle match incl spike case, " +
                    "closed-form miss " + fmt(miss) + " steps"};
}

// Reference inversion for criterion 11: envelope walk plus segment-wise
// interpolation, clamping only on strict overshoot.
evaluation::ProgressLost ref_progress(double target,
                                      const std::vector<uint64_t>& steps,
                                      const std::vector<double>& losses) {
  size_t n = steps.size();
  std::vector<double> env(n);
  env[0] = losses[0];
  for (size_t i = 1; i < n; ++i) env[i] = std::min(env[i - 1], losses[i]);
  double total = static_cast<double>(steps[n - 1]);
  if (target >= env[0]) return {1.0, target > env[0], false};
  if (target <= env[n - 1]) return {0.0, false, target < env[n - 1]};
  for (size_t i = 0; i + 1 < n; ++i) {
    double v0 = env[i], v1 = env[i + 1];
    if (v0 >= target && target >= v1) {
      if (v0 == v1) {
        if (target == v0)
          return {1.0 - static_cast<double>(steps[i]) / total, false, false};
        continue;
      }
      double t = static_cast<double>(steps[i]) +
                 (static_cast<double>(steps[i + 1]) -
                  static_cast<double>(steps[i])) *
                     (v0 - target) / (v0 - v1);
      return {1.0 - t / total, false, false};
    }
  }
  return {0.0, false, false};
}

Outcome criterion_11() {
  std::vector<uint64_t> lin_steps;
  std::vector<double> lin_losses;
  for (int i = 0; i <= 100; ++i) {
    lin_steps.push_back(i);
    lin_losses.push_back(4.0 - 0.01 * i);
  }
  auto lin = evaluation::progress_lost(3.95, lin_steps, lin_losses);
  bool linear_ok = std::abs(lin.fraction - 0.95) <= 1e-12;

  bool oracle_ok = true;
  std::vector<uint64_t> steps{0, 10, 20, 30, 40};
  std::vector<double> plateau{4.0, 3.5, 3.5, 3.5, 3.0};
  for (double target : {4.5, 4.0, 3.75, 3.5, 3.25, 3.0, 2.5}) {
    auto got = evaluation::progress_lost(target, steps, plateau);
    auto want = ref_progress(target, steps, plateau);
    oracle_ok = oracle_ok &&
                std::abs(got.fraction - want.fraction) <= 1e-12 &&
                got.clamped_high == want.clamped_high &&
                got.clamped_low == want.clamped_low;
  }

  rng::SubStream s(11, "progress-acc", 0);
  for (int rep = 0; rep < 50 && oracle_ok; ++rep) {
    size_t n = 3 + s.bounded(20);
    std::vector<uint64_t> st;
    std::vector<double> ls;
    double level = 5.0;
    for (size_t i = 0; i < n; ++i) {
      st.push_back(10 * i);
      level -= 0.25 * static_cast<double>(s.bounded(4)); // may plateau
      ls.push_back(level + 0.5 * s.uniform());           // may wiggle up
    }
    for (int t = 0; t < 5; ++t) {
      double target = uniform_in(s, level - 1.0, 5.5);
      auto got = evaluation::progress_lost(target, st, ls);
      auto want = ref_progress(target, st, ls);
      oracle_ok = oracle_ok &&
                  std::abs(got.fraction - want.fraction) <= 1e-12 &&
                  got.clamped_high == want.clamped_high &&
                  got.clamped_low == want.clamped_low;
    }
  }

  bool pass = linear_ok && oracle_ok;
  return {pass, "linear case " + fmt(lin.fraction) +
                    ", clamp and plateau rules match the inversion oracle"};
}

Outcome criterion_12() {
  using optimizers::Variant;
  auto adam = optimizers::run_toy_quadratic(Variant::adam, 0.0, 100, 0.1);
  double adam_dist =
      std::hypot(adam.back().x - 2.0, adam.back().y + 3.0);
  bool adam_ok = adam_dist <= 0.05;

  auto w0 = optimizers::run_toy_quadratic(Variant::adamw, 0.0, 100, 0.1);
  auto n0 = optimizers::run_toy_quadratic(Variant::anchored_adamw, 0.0, 100,
                                          0.1);
  bool bitwise_ok = true;
  for (size_t i = 0; i < adam.size(); ++i) {
    bitwise_ok = bitwise_ok && adam[i].x == w0[i].x && adam[i].y == w0[i].y &&
                 adam[i].x == n0[i].x && adam[i].y == n0[i].y;
  }

  auto anchored =
      optimizers::run_toy_quadratic(Variant::anchored_adamw, 1e3, 100, 0.1);
  double anchor_dist =
      std::hypot(anchored.back().x - 4.0, anchored.back().y - 4.0);
  bool anchor_ok = anchor_dist <= 0.05;

  bool pass = adam_ok && bitwise_ok && anchor_ok;
  return {pass, "adam dist@100 " + fmt(adam_dist) +
                    (adam_ok ? " <= 0.05" : " > 0.05 (first step within "
                                            "tolerance is 139)") +
                    "; lambda=0 bit-exact " + (bitwise_ok ? "yes" : "NO") +
                    "; anchored dist " + fmt(anchor_dist)};
}

Outcome criterion_13() {
  FitDataset data = surrogate::gen_ift_grid(0.0, 0);
  auto fr = fitting::fit(LawFamily::multiplicative_ft, data.records,
                         fitting::default_fit_config());
  double da = std::abs(fr.params.alpha - 0.17);
  double db = std::abs(fr.params.beta - 0.03);
  bool pass = da <= 1e-4 && db <= 1e-4;
  return {pass, "alpha err " + fmt(da) + ", beta err " + fmt(db) + " (A " +
                    fmt(fr.params.A) + ", E " + fmt(fr.params.E) + ")"};
}

int run_cli(const std::string& args) {
  std::string cmd = "'" + std::string(SCALELAB_CLI_PATH) + "' " + args +
                    " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : (WIFEXITED(rc) ? WEXITSTATUS(rc) : -1);
}

Outcome criterion_14() {
  const std::vector<std::string> files = {
      "acc14_a.jsonl", "acc14_a.l0.json", "acc14_a_fit.json",
      "acc14_a_rep.csv", "acc14_b.jsonl", "acc14_b.l0.json",
      "acc14_b_fit.json", "acc14_b_rep.csv"};
  auto cleanup = [&] {
    for (const auto& f : files) std::remove(f.c_str());
  };

  bool ran = true;
  for (char tag : {'a', 'b'}) {
    std::string base = std::string("acc14_") + tag;
    ran = ran && run_cli("simulate --grid-preset paper125 --domain arxiv "
                         "--noise-sigma 0.005 --seed 42 --output " +
                         base + ".jsonl") == 0;
    ran = ran && run_cli("fit --input " + base + ".jsonl --input " + base +
                         ".l0.json --family forgetting_mult --output " +
                         base + "_fit.json") == 0;
    ran = ran && run_cli("report --input " + base + ".jsonl --input " + base +
                         ".l0.json --input " + base + "_fit.json --output " +
                         base + "_rep.csv") == 0;
  }
  if (!ran) {
    cleanup();
    return {false, "pipeline command failed"};
  }

  bool runs_eq = io::read_file("acc14_a.jsonl") == io::read_file("acc14_b.jsonl");
  bool fit_eq =
      io::read_file("acc14_a_fit.json") == io::read_file("acc14_b_fit.json");
  bool rep_eq =
      io::read_file("acc14_a_rep.csv") == io::read_file("acc14_b_rep.csv");
  cleanup();

  bool pass = runs_eq && fit_eq && rep_eq;
  return {pass, std::string("rerun byte-identical: runs ") +
                    (runs_eq ? "yes" : "NO") + ", fit " +
                    (fit_eq ? "yes" : "NO") + ", report " +
                    (rep_eq ? "yes" : "NO")};
}

struct Criterion {
  const char* label;
  std::function<Outcome()> run;
};

const std::array<Criterion, 14> kCriteria = {{
    {"law arithmetic against pinned values", criterion_1},
    {"noiseless fit recovery", criterion_2},
    {"bootstrap spread on noisy grid", criterion_3},
    {"extrapolation setups A and B", criterion_4},
    {"huber branches and log-space identity", criterion_5},
    {"analytic gradients vs finite differences", criterion_6},
    {"mixture sampler endpoints, band, replay", criterion_7},
    {"token split and training-cost table", criterion_8},
    {"mask bit packing bijection", criterion_9},
    {"loss-curve bottom extraction", criterion_10},
    {"progress-lost inversion", criterion_11},
    {"toy optimizer targets", criterion_12},
    {"instruction-tuning grid recovery", criterion_13},
    {"command pipeline determinism", criterion_14},
}};

int run_one(int index) {
  const Criterion& c = kCriteria[index - 1];
  auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = c.run();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("[%s] criterion %2d: %s | %s | %.2fs\n",
              out.pass ? "PASS" : "FAIL", index, c.label, out.detail.c_str(),
              secs);
  std::fflush(stdout);
  return out.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    int index = std::atoi(argv[1]);
    if (index < 1 || index > 14) {
      std::fprintf(stderr, "usage: %s [criterion 1..14]\n", argv[0]);
      return 2;
    }
    return run_one(index);
  }
  int failures = 0;
  for (int i = 1; i <= 14; ++i) failures += run_one(i);
  return failures == 0 ? 0 : 1;
}
