#include "scalelab/laws.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scalelab::laws {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_covariates(LawFamily f, const LawParams& params,
                      const Covariates& c) {
  if (!(c.n_params > 0))
    throw std::invalid_argument("eval_law: n_params must be positive");
  if (!(c.dft_tokens > 0))
    throw std::invalid_argument("eval_law: dft_tokens must be positive");
  if (!(c.p >= 0.0 && c.p <= 1.0))
    throw std::invalid_argument("eval_law: p must lie in [0, 1]");
  if (needs_l0(f) && !(params.l0_pt > 0))
    throw std::invalid_argument("eval_law: baseline loss required for this family");
}

// Log of each positive summand; omitted when its coefficient is zero.
// Shared by log_space_eval and by eval_law, which exponentiates.
int summand_logs(LawFamily f, const LawParams& q, const Covariates& c,
                 std::array<double, 3>& t) {
  const double lN = std::log(c.n_params);
  const double lD = std::log(c.dft_tokens);
  int n = 0;
  switch (f) {
    case LawFamily::additive_nd:
      if (q.A > 0) t[n++] = std::log(q.A) - q.alpha * lN;
      if (q.B > 0) t[n++] = std::log(q.B) - q.beta * lD;
      if (q.E > 0) t[n++] = std::log(q.E);
      break;
    case LawFamily::multiplicative_ft:
      if (q.A > 0) t[n++] = std::log(q.A) - q.alpha * lN - q.beta * lD;
      if (q.E > 0) t[n++] = std::log(q.E);
      break;
    case LawFamily::forgetting_mult: {
      t[n++] = std::log(q.l0_pt);
      if (q.A > 0)
        t[n++] = std::log(q.A) + q.beta * lD -
                 q.alpha * (std::log1p(q.B * c.p) + lN);
      break;
    }
    case LawFamily::forgetting_kappa: {
      if (q.A > 0) {
        if (c.p < 1.0)
          t[n++] = std::log(q.A) + q.beta * lD +
                   q.kappa * std::log1p(-c.p) - q.alpha * lN;
        else if (q.kappa == 0.0)
          t[n++] = std::log(q.A) + q.beta * lD - q.alpha * lN;
        // p == 1 with kappa > 0: the term is exactly zero
      }
      if (q.E > 0) t[n++] = std::log(q.E);
      break;
    }
    case LawFamily::forgetting_additive_delta:
      if (q.A > 0) t[n++] = std::log(q.A) - q.alpha * lN;
      if (q.B > 0) t[n++] = std::log(q.B) + q.beta * lD;
      if (q.E > 0) t[n++] = std::log(q.E);
      break;
    case LawFamily::forgetting_no_base: {
      if (q.A > 0)
        t[n++] = std::log(q.A) + q.beta * lD -
                 q.alpha * (std::log1p(q.B * c.p) + lN);
      if (q.E > 0) t[n++] = std::log(q.E);
      break;
    }
  }
  return n;
}

} // namespace

std::string_view family_tag(LawFamily f) {
  switch (f) {
    case LawFamily::additive_nd: return "additive_nd";
    case LawFamily::multiplicative_ft: return "multiplicative_ft";
    case LawFamily::forgetting_mult: return "forgetting_mult";
    case LawFamily::forgetting_kappa: return "forgetting_kappa";
    case LawFamily::forgetting_additive_delta: return "forgetting_additive_delta";
    case LawFamily::forgetting_no_base: return "forgetting_no_base";
  }
  return "unknown";
}

std::optional<LawFamily> family_from_tag(std::string_view tag) {
  for (int i = 0; i < kNumFamilies; ++i) {
    auto f = static_cast<LawFamily>(i);
    if (family_tag(f) == tag) return f;
  }
  return std::nullopt;
}

bool predicts_delta(LawFamily f) {
  return f == LawFamily::forgetting_additive_delta;
}

bool needs_l0(LawFamily f) { return f == LawFamily::forgetting_mult; }

double eval_law(LawFamily f, const LawParams& params, const Covariates& c) {
  check_covariates(f, params, c);
  std::array<double, 3> t;
  int n = summand_logs(f, params, c, t);
  double v = 0;
  for (int i = 0; i < n; ++i) v += std::exp(t[i]);
  return v;
}

LogEval log_space_eval(LawFamily f, const LawParams& params,
                       const Covariates& c) {
  check_covariates(f, params, c);
  std::array<double, 3> t;
  int n = summand_logs(f, params, c, t);
  if (n == 0) return {kNegInf, true};
  double m = *std::max_element(t.begin(), t.begin() + n);
  double s = 0;
  for (int i = 0; i < n; ++i) s += std::exp(t[i] - m);
  return {m + std::log(s), false};
}

namespace {

constexpr std::array<ParamKind, 5> kLayoutAdditiveNd = {
    ParamKind::LogA, ParamKind::LogB, ParamKind::LogE, ParamKind::Alpha,
    ParamKind::Beta};
constexpr std::array<ParamKind, 4> kLayoutMultFt = {
    ParamKind::LogA, ParamKind::LogE, ParamKind::Alpha, ParamKind::Beta};
constexpr std::array<ParamKind, 4> kLayoutForgMult = {
    ParamKind::LogA, ParamKind::LogB, ParamKind::Alpha, ParamKind::Beta};
constexpr std::array<ParamKind, 5> kLayoutForgKappa = {
    ParamKind::LogA, ParamKind::LogE, ParamKind::Alpha, ParamKind::Beta,
    ParamKind::Kappa};
constexpr std::array<ParamKind, 5> kLayoutFiveCoef = {
    ParamKind::LogA, ParamKind::LogB, ParamKind::LogE, ParamKind::Alpha,
    ParamKind::Beta};

} // namespace

std::span<const ParamKind> param_layout(LawFamily f) {
  switch (f) {
    case LawFamily::additive_nd: return kLayoutAdditiveNd;
    case LawFamily::multiplicative_ft: return kLayoutMultFt;
    case LawFamily::forgetting_mult: return kLayoutForgMult;
    case LawFamily::forgetting_kappa: return kLayoutForgKappa;
    case LawFamily::forgetting_additive_delta: return kLayoutFiveCoef;
    case LawFamily::forgetting_no_base: return kLayoutFiveCoef;
  }
  return {};
}

std::pair<double, double> kind_bounds(ParamKind k) {
  switch (k) {
    case ParamKind::LogA:
    case ParamKind::LogB: return {-30.0, 30.0};
    case ParamKind::LogE: return {kLogEFloor, 10.0};
    case ParamKind::Alpha:
    case ParamKind::Beta:
    case ParamKind::Kappa: return {0.0, 2.0};
  }
  return {0.0, 0.0};
}

std::vector<double> pack_params(LawFamily f, const LawParams& params) {
  auto layout = param_layout(f);
  std::vector<double> x(layout.size());
  for (size_t i = 0; i < layout.size(); ++i) {
    switch (layout[i]) {
      case ParamKind::LogA:
        if (!(params.A > 0))
          throw std::invalid_argument("pack_params: A must be positive");
        x[i] = std::log(params.A);
        break;
      case ParamKind::LogB:
        if (!(params.B > 0))
          throw std::invalid_argument("pack_params: B must be positive");
        x[i] = std::log(params.B);
        break;
      case ParamKind::LogE:
        x[i] = params.E > 0 ? std::log(params.E) : kLogEFloor;
        break;
      case ParamKind::Alpha: x[i] = params.alpha; break;
      case ParamKind::Beta: x[i] = params.beta; break;
      case ParamKind::Kappa: x[i] = params.kappa; break;
    }
  }
  return x;
}

LawParams unpack_params(LawFamily f, std::span<const double> x,
                        double l0_pt) {
  auto layout = param_layout(f);
  if (x.size() != layout.size())
    throw std::invalid_argument("unpack_params: wrong vector length");
  LawParams q;
  q.l0_pt = l0_pt;
  for (size_t i = 0; i < layout.size(); ++i) {
    switch (layout[i]) {
      case ParamKind::LogA: q.A = std::exp(x[i]); break;
      case ParamKind::LogB: q.B = std::exp(x[i]); break;
      case ParamKind::LogE:
        q.E = x[i] <= kLogEFloor ? 0.0 : std::exp(x[i]);
        break;
      case ParamKind::Alpha: q.alpha = x[i]; break;
      case ParamKind::Beta: q.beta = x[i]; break;
      case ParamKind::Kappa: q.kappa = x[i]; break;
    }
  }
  return q;
}

void grad_law(LawFamily f, const LawParams& q, const Covariates& c,
              std::span<double> out) {
  check_covariates(f, q, c);
  auto layout = param_layout(f);
  if (out.size() != layout.size())
    throw std::invalid_argument("grad_law: wrong output length");
  const double lN = std::log(c.n_params);
  const double lD = std::log(c.dft_tokens);

  // Per-family derivatives of the prediction wrt each layout entry.
  double dlogA = 0, dlogB = 0, dalpha = 0, dbeta = 0, dkappa = 0;

  switch (f) {
    case LawFamily::additive_nd: {
      double termA = q.A * std::exp(-q.alpha * lN);
      double termB = q.B * std::exp(-q.beta * lD);
      dlogA = termA;
      dlogB = termB;
      dalpha = -lN * termA;
      dbeta = -lD * termB;
      break;
    }
    case LawFamily::multiplicative_ft: {
      double term = q.A * std::exp(-q.alpha * lN - q.beta * lD);
      dlogA = term;
      dalpha = -lN * term;
      dbeta = -lD * term;
      break;
    }
    case LawFamily::forgetting_mult:
    case LawFamily::forgetting_no_base: {
      double lg = std::log1p(q.B * c.p);
      double term = q.A * std::exp(q.beta * lD - q.alpha * (lg + lN));
      dlogA = term;
      dlogB = -q.alpha * term * (q.B * c.p / (1.0 + q.B * c.p));
      dalpha = -(lg + lN) * term;
      dbeta = lD * term;
      break;
    }
    case LawFamily::forgetting_kappa: {
      double w = c.p < 1.0 ? std::exp(q.kappa * std::log1p(-c.p))
                           : (q.kappa == 0.0 ? 1.0 : 0.0);
      double term = q.A * std::exp(q.beta * lD - q.alpha * lN) * w;
      dlogA = term;
      dalpha = -lN * term;
      dbeta = lD * term;
      dkappa = c.p < 1.0 ? term * std::log1p(-c.p) : 0.0;
      break;
    }
    case LawFamily::forgetting_additive_delta: {
      double termA = q.A * std::exp(-q.alpha * lN);
      double termB = q.B * std::exp(q.beta * lD);
      dlogA = termA;
      dlogB = termB;
      dalpha = -lN * termA;
      dbeta = lD * termB;
      break;
    }
  }

  for (size_t i = 0; i < layout.size(); ++i) {
    switch (layout[i]) {
      case ParamKind::LogA: out[i] = dlogA; break;
      case ParamKind::LogB: out[i] = dlogB; break;
      case ParamKind::LogE: out[i] = q.E; break;
      case ParamKind::Alpha: out[i] = dalpha; break;
      case ParamKind::Beta: out[i] = dbeta; break;
      case ParamKind::Kappa: out[i] = dkappa; break;
    }
  }
}

} // namespace scalelab::laws
