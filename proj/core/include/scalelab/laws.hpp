#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace scalelab::laws {

enum class LawFamily {
  additive_nd,              // E + A/N^a + B/D^b
  multiplicative_ft,        // A / (N^a * D^b) + E
  forgetting_mult,          // L0 + A * D^b / ((1 + B*p) * N)^a
  forgetting_kappa,         // A * D^b * (1-p)^k / N^a + E
  forgetting_additive_delta,// A/N^a + B*D^b + E, predicts the rise over L0
  forgetting_no_base,       // A * D^b / ((1 + B*p) * N)^a + E
};

constexpr int kNumFamilies = 6;

std::string_view family_tag(LawFamily f);
std::optional<LawFamily> family_from_tag(std::string_view tag);

// True for families whose response is the pretraining loss rise, not the
// loss itself.
bool predicts_delta(LawFamily f);
// True for families that anchor on a per-model-size baseline loss.
bool needs_l0(LawFamily f);

struct LawParams {
  double A = 0;
  double B = 0;
  double E = 0;
  double alpha = 0;
  double beta = 0;
  double kappa = 0;
  double l0_pt = 0; // baseline, used by anchored families only
};

struct Covariates {
  double n_params = 0;
  double dft_tokens = 0;
  double p = 0;
};

// Prediction in linear space. Throws std::invalid_argument on nonpositive
// N or D_ft, p outside [0, 1], or a missing baseline where one is needed.
double eval_law(LawFamily f, const LawParams& params, const Covariates& c);

// Prediction in log space via log-sum-exp over the summands. A summand
// with coefficient exactly zero is omitted; if every summand is omitted
// the result is empty=true with value -inf.
struct LogEval {
  double value = 0;
  bool empty = false;
};
LogEval log_space_eval(LawFamily f, const LawParams& params,
                       const Covariates& c);

// Free-parameter layout used by the fitter. Coefficients live in log
// space, exponents in linear space.
enum class ParamKind { LogA, LogB, LogE, Alpha, Beta, Kappa };

std::span<const ParamKind> param_layout(LawFamily f);
std::pair<double, double> kind_bounds(ParamKind k);

constexpr double kLogEFloor = -10.0;

// LawParams <-> optimizer vector. Unpacking a logE at the floor yields
// E = 0.
std::vector<double> pack_params(LawFamily f, const LawParams& params);
LawParams unpack_params(LawFamily f, std::span<const double> x,
                        double l0_pt = 0);

// d eval_law / d x for the layout above, evaluated in linear space.
void grad_law(LawFamily f, const LawParams& params, const Covariates& c,
              std::span<double> out);

} // namespace scalelab::laws
