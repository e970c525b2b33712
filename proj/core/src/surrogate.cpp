#include "scalelab/surrogate.hpp"

#include <cmath>
#include <stdexcept>

#include "scalelab/rng.hpp"

namespace scalelab::surrogate {

using laws::Covariates;
using laws::LawFamily;

SurrogateSpec make_surrogate_spec(const presets::DomainPreset& preset,
                                  double noise_sigma, uint64_t seed) {
  SurrogateSpec spec;
  spec.domain = preset.name;
  spec.ft_params = preset.ft;
  spec.fg_params = preset.fg;
  auto models = presets::builtin_models();
  spec.model_grid.assign(models.begin(), models.end());
  auto tokens = presets::builtin_token_grid();
  spec.token_grid.assign(tokens.begin(), tokens.end());
  auto ps = presets::builtin_p_grid();
  spec.p_grid.assign(ps.begin(), ps.end());
  spec.noise_sigma = noise_sigma;
  spec.seed = seed;
  return spec;
}

FitDataset gen_grid(const SurrogateSpec& spec) {
  if (spec.model_grid.empty() || spec.token_grid.empty() ||
      spec.p_grid.empty())
    throw std::invalid_argument("gen_grid: empty grid axis");
  if (spec.noise_sigma < 0)
    throw std::invalid_argument("gen_grid: negative noise_sigma");

  FitDataset out;
  out.domain = spec.domain;
  uint64_t cell = 0;
  for (const ModelSpec& model : spec.model_grid) {
    for (uint64_t dft : spec.token_grid) {
      for (double p : spec.p_grid) {
        Covariates c{static_cast<double>(model.n_params),
                     static_cast<double>(dft), p};
        double ft_clean =
            laws::eval_law(LawFamily::multiplicative_ft, spec.ft_params, c);
        laws::LawParams fg = spec.fg_params;
        fg.l0_pt = model.pt_loss_rewarmed;
        double pt_clean =
            laws::eval_law(LawFamily::forgetting_mult, fg, c);

        rng::SubStream stream(spec.seed, "gengrid", cell);
        auto [z_ft, z_pt] = stream.normal_pair();
        double ft = ft_clean * std::exp(spec.noise_sigma * z_ft);
        double pt = model.pt_loss_rewarmed +
                    (pt_clean - model.pt_loss_rewarmed) *
                        std::exp(spec.noise_sigma * z_pt);

        RunRecord r;
        r.domain = spec.domain;
        r.n_params = model.n_params;
        r.dft_tokens = dft;
        r.p = p;
        r.min_val_ft_loss = ft;
        r.pt_loss_at_min = pt;
        uint64_t step_tokens = static_cast<uint64_t>(model.batch_size) *
                               presets::kSeqLen;
        r.steps_to_min = (dft + step_tokens - 1) / step_tokens;
        r.seq_len = presets::kSeqLen;
        r.batch_size = model.batch_size;
        out.records.push_back(std::move(r));
        ++cell;
      }
    }
  }
  return out;
}

FitDataset gen_ift_grid(double noise_sigma, uint64_t seed) {
  return gen_grid(make_surrogate_spec(presets::ift_preset(), noise_sigma,
                                      seed));
}

double analytic_bottom_step(const CurveShape& shape) {
  if (shape.overfit_gamma != 1.0)
    throw std::invalid_argument(
        "analytic_bottom_step: closed form needs gamma == 1");
  double a = shape.l_start - shape.l_min;
  double denom = shape.overfit_rate * shape.tau;
  if (!(a > 0) || !(denom > 0))
    throw std::invalid_argument("analytic_bottom_step: degenerate shape");
  return shape.tau * std::log(a / denom);
}

LossCurve gen_curve(const CurveShape& shape, double pt_start,
                    double pt_at_bottom) {
  if (shape.log_every == 0 || shape.total_steps == 0)
    throw std::invalid_argument("gen_curve: empty step grid");
  if (!(shape.l_start > shape.l_min) || !(shape.l_min > 0))
    throw std::invalid_argument("gen_curve: need l_start > l_min > 0");

  auto val_ft_at = [&](double t) {
    return shape.l_min + (shape.l_start - shape.l_min) * std::exp(-t / shape.tau) +
           shape.overfit_rate * std::pow(t, shape.overfit_gamma);
  };

  double t_bottom;
  if (shape.overfit_gamma == 1.0) {
    t_bottom = analytic_bottom_step(shape);
  } else {
    t_bottom = 0;
    double best = val_ft_at(0);
    for (uint64_t s = 0; s <= shape.total_steps; s += shape.log_every) {
      double v = val_ft_at(static_cast<double>(s));
      if (v < best) {
        best = v;
        t_bottom = static_cast<double>(s);
      }
    }
  }

  LossCurve curve;
  curve.run_id = "synthetic";
  for (uint64_t s = 0; s <= shape.total_steps; s += shape.log_every) {
    double t = static_cast<double>(s);
    curve.steps.push_back(s);
    curve.train_ft.push_back(shape.l_min +
                             (shape.l_start - shape.l_min) *
                                 std::exp(-t / shape.tau));
    curve.val_ft.push_back(val_ft_at(t));
    double ramp = t_bottom > 0 ? std::min(1.0, t / t_bottom) : 1.0;
    curve.val_pt.push_back(pt_start + (pt_at_bottom - pt_start) * ramp);
  }
  return curve;
}

} // namespace scalelab::surrogate
