#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalelab/laws.hpp"
#include "scalelab/types.hpp"

namespace scalelab::fitting {

using laws::LawFamily;
using laws::LawParams;
using laws::ParamKind;

// Huber penalty: quadratic core of half-width delta, linear tails.
double huber(double r, double delta);

struct FitConfig {
  double huber_delta = 1e-4;
  int max_iterations = 500;
  double grad_tolerance = 1e-9;
  // Per-parameter start values; the cartesian product over a family's
  // layout forms the multistart set.
  std::map<ParamKind, std::vector<double>> init_grid;
  std::map<ParamKind, std::pair<double, double>> bounds;
};

FitConfig default_fit_config();
std::string fit_config_to_json(const FitConfig& config);
FitConfig fit_config_from_json(const std::string& text);

struct FitFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StartDiagnostic {
  int index = 0;
  double objective = 0;
  bool converged = false;
  bool aborted = false;
};

struct FitResult {
  LawFamily family = LawFamily::additive_nd;
  LawParams params;
  double objective = 0;
  bool converged = false;
  int n_starts = 0;
  int best_start_index = 0;
  std::string seed_provenance;
  std::vector<StartDiagnostic> starts;
};

std::string fit_result_to_json(const FitResult& result);
FitResult fit_result_from_json(const std::string& text);

// The observed quantity a family is fitted against. Anchored-delta fits
// need the baseline table to form the response.
bool response_needs_l0(LawFamily f);
double response_value(LawFamily f, const RunRecord& r, const L0Table* l0);

// Sum of Huber penalties on log-space residuals.
double objective(LawFamily f, const LawParams& params,
                 std::span<const RunRecord> records, const FitConfig& config,
                 const L0Table* l0 = nullptr);

// Multistart bounded quasi-Newton fit. Ties between starts break by
// lower objective, then smaller parameter-vector norm, then lower start
// index. Throws FitFailure when no start produces a finite objective.
FitResult fit(LawFamily f, std::span<const RunRecord> records,
              const FitConfig& config = default_fit_config(),
              const L0Table* l0 = nullptr);

std::vector<double> predict_batch(LawFamily f, const LawParams& params,
                                  std::span<const RunRecord> records,
                                  const L0Table* l0 = nullptr);
std::vector<double> observed_batch(LawFamily f,
                                   std::span<const RunRecord> records,
                                   const L0Table* l0 = nullptr);

} // namespace scalelab::fitting
