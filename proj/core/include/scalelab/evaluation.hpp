#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalelab/fitting.hpp"
#include "scalelab/types.hpp"

namespace scalelab::evaluation {

using fitting::FitConfig;
using fitting::LawFamily;

// Mean relative error of predictions against observations.
double mre(std::span<const double> predicted, std::span<const double> observed);

struct BootstrapConfig {
  int repetitions = 128;
  uint64_t seed = 0;
  // Resample size; defaults to the dataset size.
  std::optional<size_t> resample_size;
};

struct BootstrapResult {
  double mean_mre = 0;
  std::vector<double> per_rep;
  int failed_reps = 0;
  std::string note;
};

// Case resampling with replacement. Each repetition refits on the
// resample and scores MRE against the full original dataset, so the
// spread reflects fit stability, not held-out error.
BootstrapResult bootstrap_mre(LawFamily f, const FitDataset& dataset,
                              const FitConfig& fit_config,
                              const BootstrapConfig& config,
                              const L0Table* l0 = nullptr);

struct ExtrapolationSetup {
  std::string name;
  std::vector<std::string> excluded_model_sizes;
  std::vector<uint64_t> excluded_token_counts;
};

// Holds out the largest model; holds out the largest token budget.
ExtrapolationSetup setup_A();
// Holds out the two largest models and two largest token budgets.
ExtrapolationSetup setup_B();

// Fits on the records outside the exclusion union and scores MRE on the
// records inside it.
double extrapolation_mre(LawFamily f, const FitDataset& dataset,
                         const ExtrapolationSetup& setup,
                         const FitConfig& fit_config,
                         const L0Table* l0 = nullptr);

struct UcurveBottom {
  uint64_t step = 0;
  double loss = 0; // raw series value at the chosen step
  bool no_overfitting = false;
};

// Bottom of a loss curve, located on a centered moving-median smoothing
// (window 5, shrunk near the edges). Ties break toward the lower raw
// value, then the earlier step. A strictly decreasing series returns the
// last step with no_overfitting set.
UcurveBottom ucurve_bottom(std::span<const uint64_t> steps,
                           std::span<const double> losses);

struct ProgressLost {
  double fraction = 0;
  bool clamped_high = false; // strictly above the curve's starting loss
  bool clamped_low = false;  // strictly below the curve's best loss
};

// Fraction of a pretraining run undone by finetuning: walks the
// running-minimum envelope of the pretraining curve, finds the earliest
// (interpolated) step where it reaches the post-finetuning loss, and
// returns 1 - step/total.
ProgressLost progress_lost(double pt_loss_after,
                           std::span<const uint64_t> steps,
                           std::span<const double> losses);

struct ZTestResult {
  double z = 0;
  bool significant = false;
  double delta_points = 0; // accuracy difference in percentage points
};

// Pooled two-proportion z-test. At the default 0.99 level the critical
// value is pinned to 2.5758.
ZTestResult two_proportion_ztest(double acc_a, uint64_t n_a, double acc_b,
                                 uint64_t n_b, double level = 0.99);

// Quantile of the standard normal (rational approximation plus one
// Halley refinement; absolute error under 1e-8).
double inverse_normal_cdf(double p);

} // namespace scalelab::evaluation
