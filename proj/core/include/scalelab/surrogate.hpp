#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalelab/laws.hpp"
#include "scalelab/presets.hpp"
#include "scalelab/types.hpp"

namespace scalelab::surrogate {

// Generator settings for synthetic run grids. Finetuning losses come
// from a saturating power law, pretraining losses from an anchored
// forgetting law; optional lognormal noise multiplies the law value
// (the rise over the baseline, for the anchored side).
struct SurrogateSpec {
  std::string domain = "synthetic";
  laws::LawParams ft_params; // multiplicative_ft
  laws::LawParams fg_params; // forgetting_mult, baseline set per model
  std::vector<ModelSpec> model_grid;
  std::vector<uint64_t> token_grid;
  std::vector<double> p_grid;
  double noise_sigma = 0;
  uint64_t seed = 0;
};

SurrogateSpec make_surrogate_spec(const presets::DomainPreset& preset,
                                  double noise_sigma, uint64_t seed);

// Full factorial grid; records ordered model-major, then token budget,
// then p. Cell i draws its noise from the i-indexed substream, so any
// sub-grid reproduces the full grid's values.
FitDataset gen_grid(const SurrogateSpec& spec);

// Instruction-tuning preset over the same grids.
FitDataset gen_ift_grid(double noise_sigma, uint64_t seed);

// Synthetic per-step series: exponential approach plus a power-law
// overfitting term for the finetuning loss, a ramp toward the forgotten
// level for the pretraining loss.
struct CurveShape {
  double l_start = 4.0;
  double l_min = 2.0;
  double tau = 200;
  double overfit_rate = 1e-4;
  double overfit_gamma = 1.0;
  uint64_t total_steps = 3000;
  uint64_t log_every = 50;
};

LossCurve gen_curve(const CurveShape& shape, double pt_start,
                    double pt_at_bottom);

// Minimizer of the continuous val_ft curve; closed form for gamma == 1.
double analytic_bottom_step(const CurveShape& shape);

} // namespace scalelab::surrogate
