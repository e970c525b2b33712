#include "scalelab/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "scalelab/lbfgs.hpp"
#include "scalelab/threads.hpp"

namespace scalelab::fitting {

using laws::Covariates;
using laws::kLogEFloor;
using laws::param_layout;
using nlohmann::json;

double huber(double r, double delta) {
  double a = std::abs(r);
  if (a <= delta) return 0.5 * r * r;
  return delta * (a - 0.5 * delta);
}

namespace {

const char* kind_tag(ParamKind k) {
  switch (k) {
    case ParamKind::LogA: return "logA";
    case ParamKind::LogB: return "logB";
    case ParamKind::LogE: return "logE";
    case ParamKind::Alpha: return "alpha";
    case ParamKind::Beta: return "beta";
    case ParamKind::Kappa: return "kappa";
  }
  return "unknown";
}

ParamKind kind_from_tag(const std::string& tag) {
  for (ParamKind k : {ParamKind::LogA, ParamKind::LogB, ParamKind::LogE,
                      ParamKind::Alpha, ParamKind::Beta, ParamKind::Kappa})
    if (tag == kind_tag(k)) return k;
  throw std::invalid_argument("unknown parameter tag '" + tag + "'");
}

constexpr std::array<ParamKind, 6> kAllKinds = {
    ParamKind::LogA, ParamKind::LogB, ParamKind::LogE,
    ParamKind::Alpha, ParamKind::Beta, ParamKind::Kappa};

double lookup_l0(const L0Table* l0, uint64_t n_params) {
  if (!l0)
    throw std::invalid_argument("baseline table required for this family");
  auto it = l0->find(n_params);
  if (it == l0->end())
    throw std::invalid_argument("baseline table has no entry for n_params " +
                                std::to_string(n_params));
  return it->second;
}

// Dataset view with the per-record quantities the objective needs,
// precomputed once per fit.
struct Problem {
  LawFamily family;
  double delta;
  std::vector<double> lN, lD, p, log_resp, lL0;

  Problem(LawFamily f, std::span<const RunRecord> records, double huber_delta,
          const L0Table* l0)
      : family(f), delta(huber_delta) {
    size_t n = records.size();
    lN.resize(n);
    lD.resize(n);
    p.resize(n);
    log_resp.resize(n);
    if (laws::needs_l0(f)) lL0.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const RunRecord& r = records[i];
      if (r.n_params == 0 || r.dft_tokens == 0)
        throw std::invalid_argument("record with zero n_params or dft_tokens");
      lN[i] = std::log(static_cast<double>(r.n_params));
      lD[i] = std::log(static_cast<double>(r.dft_tokens));
      p[i] = r.p;
      double resp = response_value(f, r, l0);
      if (!(resp > 0) || !std::isfinite(resp))
        throw std::invalid_argument(
            "record " + std::to_string(i) +
            ": response is not positive, cannot fit in log space");
      log_resp[i] = std::log(resp);
      if (laws::needs_l0(f)) lL0[i] = std::log(lookup_l0(l0, r.n_params));
    }
  }

  size_t size() const { return lN.size(); }

  // Objective and gradient in optimizer space (log coefficients, linear
  // exponents). Layout matches laws::param_layout.
  double value_grad(std::span<const double> x, std::span<double> g) const;
  double value(std::span<const double> x) const {
    std::vector<double> g(x.size());
    return value_grad(x, g);
  }
};

double Problem::value_grad(std::span<const double> x,
                           std::span<double> g) const {
  std::fill(g.begin(), g.end(), 0.0);
  double total = 0;

  // Accumulators reused across records: term logs and d(term log)/dx.
  std::array<double, 3> t;
  std::array<std::array<double, 5>, 3> dt;
  const size_t dim = x.size();

  for (size_t i = 0; i < size(); ++i) {
    int nt = 0;
    for (auto& row : dt) row.fill(0.0);

    switch (family) {
      case LawFamily::additive_nd: {
        // x = [logA, logB, logE, alpha, beta]
        t[0] = x[0] - x[3] * lN[i];
        dt[0][0] = 1;
        dt[0][3] = -lN[i];
        t[1] = x[1] - x[4] * lD[i];
        dt[1][1] = 1;
        dt[1][4] = -lD[i];
        t[2] = x[2];
        dt[2][2] = 1;
        nt = 3;
        break;
      }
      case LawFamily::multiplicative_ft: {
        // x = [logA, logE, alpha, beta]
        t[0] = x[0] - x[2] * lN[i] - x[3] * lD[i];
        dt[0][0] = 1;
        dt[0][2] = -lN[i];
        dt[0][3] = -lD[i];
        t[1] = x[1];
        dt[1][1] = 1;
        nt = 2;
        break;
      }
      case LawFamily::forgetting_mult: {
        // x = [logA, logB, alpha, beta]
        t[0] = lL0[i];
        double B = std::exp(x[1]);
        double lg = std::log1p(B * p[i]);
        t[1] = x[0] + x[3] * lD[i] - x[2] * (lg + lN[i]);
        dt[1][0] = 1;
        dt[1][1] = -x[2] * (B * p[i] / (1.0 + B * p[i]));
        dt[1][2] = -(lg + lN[i]);
        dt[1][3] = lD[i];
        nt = 2;
        break;
      }
      case LawFamily::forgetting_kappa: {
        // x = [logA, logE, alpha, beta, kappa]
        nt = 0;
        if (p[i] < 1.0) {
          double l1p = std::log1p(-p[i]);
          t[nt] = x[0] + x[3] * lD[i] + x[4] * l1p - x[2] * lN[i];
          dt[nt][0] = 1;
          dt[nt][2] = -lN[i];
          dt[nt][3] = lD[i];
          dt[nt][4] = l1p;
          ++nt;
        } else if (x[4] == 0.0) {
          t[nt] = x[0] + x[3] * lD[i] - x[2] * lN[i];
          dt[nt][0] = 1;
          dt[nt][2] = -lN[i];
          dt[nt][3] = lD[i];
          ++nt;
        }
        t[nt] = x[1];
        dt[nt][1] = 1;
        ++nt;
        break;
      }
      case LawFamily::forgetting_additive_delta: {
        // x = [logA, logB, logE, alpha, beta]
        t[0] = x[0] - x[3] * lN[i];
        dt[0][0] = 1;
        dt[0][3] = -lN[i];
        t[1] = x[1] + x[4] * lD[i];
        dt[1][1] = 1;
        dt[1][4] = lD[i];
        t[2] = x[2];
        dt[2][2] = 1;
        nt = 3;
        break;
      }
      case LawFamily::forgetting_no_base: {
        // x = [logA, logB, logE, alpha, beta]
        double B = std::exp(x[1]);
        double lg = std::log1p(B * p[i]);
        t[0] = x[0] + x[4] * lD[i] - x[3] * (lg + lN[i]);
        dt[0][0] = 1;
        dt[0][1] = -x[3] * (B * p[i] / (1.0 + B * p[i]));
        dt[0][3] = -(lg + lN[i]);
        dt[0][4] = lD[i];
        t[1] = x[2];
        dt[1][2] = 1;
        nt = 2;
        break;
      }
    }

    double m = t[0];
    for (int k = 1; k < nt; ++k) m = std::max(m, t[k]);
    double s = 0;
    std::array<double, 3> w;
    for (int k = 0; k < nt; ++k) {
      w[k] = std::exp(t[k] - m);
      s += w[k];
    }
    double tlog = m + std::log(s);
    for (int k = 0; k < nt; ++k) w[k] /= s; // softmax weights

    double r = tlog - log_resp[i];
    double a = std::abs(r);
    double dh;
    if (a <= delta) {
      total += 0.5 * r * r;
      dh = r;
    } else {
      total += delta * (a - 0.5 * delta);
      dh = r > 0 ? delta : -delta;
    }

    for (int k = 0; k < nt; ++k) {
      double c = dh * w[k];
      if (c == 0) continue;
      for (size_t j = 0; j < dim; ++j) g[j] += c * dt[k][j];
    }
  }
  return total;
}

std::vector<double> default_grid(ParamKind k) {
  switch (k) {
    case ParamKind::LogA:
    case ParamKind::LogB: return {0, 3, 6, 9, 12};
    case ParamKind::LogE:
      return {-2, -1.5, -1, 0, 0.5, 1, 1.5, 2, 2.5, 3};
    case ParamKind::Alpha:
    case ParamKind::Beta:
    case ParamKind::Kappa: return {0, 0.5, 1};
  }
  return {};
}

const std::vector<double>& grid_for(const FitConfig& config, ParamKind k) {
  auto it = config.init_grid.find(k);
  if (it != config.init_grid.end() && !it->second.empty()) return it->second;
  static const std::map<ParamKind, std::vector<double>> fallback = [] {
    std::map<ParamKind, std::vector<double>> m;
    for (ParamKind kk : kAllKinds) m[kk] = default_grid(kk);
    return m;
  }();
  return fallback.at(k);
}

std::pair<double, double> bounds_for(const FitConfig& config, ParamKind k) {
  auto it = config.bounds.find(k);
  if (it != config.bounds.end()) return it->second;
  return laws::kind_bounds(k);
}

} // namespace

FitConfig default_fit_config() {
  FitConfig c;
  for (ParamKind k : kAllKinds) {
    c.init_grid[k] = default_grid(k);
    c.bounds[k] = laws::kind_bounds(k);
  }
  return c;
}

std::string fit_config_to_json(const FitConfig& config) {
  json j;
  j["huber_delta"] = config.huber_delta;
  j["max_iterations"] = config.max_iterations;
  j["grad_tolerance"] = config.grad_tolerance;
  json grid = json::object(), bounds = json::object();
  for (const auto& [k, v] : config.init_grid) grid[kind_tag(k)] = v;
  for (const auto& [k, v] : config.bounds)
    bounds[kind_tag(k)] = json::array({v.first, v.second});
  j["init_grid"] = grid;
  j["bounds"] = bounds;
  return j.dump(2) + "\n";
}

FitConfig fit_config_from_json(const std::string& text) {
  json j = json::parse(text);
  FitConfig c;
  c.huber_delta = j.at("huber_delta").get<double>();
  c.max_iterations = j.at("max_iterations").get<int>();
  c.grad_tolerance = j.at("grad_tolerance").get<double>();
  for (auto it = j.at("init_grid").begin(); it != j.at("init_grid").end(); ++it)
    c.init_grid[kind_from_tag(it.key())] = it.value().get<std::vector<double>>();
  for (auto it = j.at("bounds").begin(); it != j.at("bounds").end(); ++it) {
    auto arr = it.value();
    c.bounds[kind_from_tag(it.key())] = {arr.at(0).get<double>(),
                                         arr.at(1).get<double>()};
  }
  return c;
}

bool response_needs_l0(LawFamily f) {
  return f == LawFamily::forgetting_additive_delta;
}

double response_value(LawFamily f, const RunRecord& r, const L0Table* l0) {
  switch (f) {
    case LawFamily::additive_nd:
    case LawFamily::multiplicative_ft: return r.min_val_ft_loss;
    case LawFamily::forgetting_mult:
    case LawFamily::forgetting_kappa:
    case LawFamily::forgetting_no_base: return r.pt_loss_at_min;
    case LawFamily::forgetting_additive_delta:
      return r.pt_loss_at_min - lookup_l0(l0, r.n_params);
  }
  return 0;
}

double objective(LawFamily f, const LawParams& params,
                 std::span<const RunRecord> records, const FitConfig& config,
                 const L0Table* l0) {
  double total = 0;
  for (const RunRecord& r : records) {
    LawParams q = params;
    if (laws::needs_l0(f)) q.l0_pt = lookup_l0(l0, r.n_params);
    Covariates c{static_cast<double>(r.n_params),
                 static_cast<double>(r.dft_tokens), r.p};
    laws::LogEval le = laws::log_space_eval(f, q, c);
    double resp = response_value(f, r, l0);
    if (!(resp > 0))
      throw std::invalid_argument("objective: nonpositive response");
    total += huber(le.value - std::log(resp), config.huber_delta);
  }
  return total;
}

FitResult fit(LawFamily f, std::span<const RunRecord> records,
              const FitConfig& config, const L0Table* l0) {
  if (records.empty()) throw std::invalid_argument("fit: empty dataset");
  if ((laws::needs_l0(f) || response_needs_l0(f)) && !l0)
    throw std::invalid_argument("fit: this family requires a baseline table");

  Problem problem(f, records, config.huber_delta, l0);
  auto layout = param_layout(f);
  const size_t dim = layout.size();

  std::vector<const std::vector<double>*> grids(dim);
  std::vector<double> lower(dim), upper(dim);
  size_t total = 1;
  for (size_t j = 0; j < dim; ++j) {
    grids[j] = &grid_for(config, layout[j]);
    auto [lo, hi] = bounds_for(config, layout[j]);
    lower[j] = lo;
    upper[j] = hi;
    total *= grids[j]->size();
  }

  opt::LbfgsOptions lopt;
  lopt.max_iterations = config.max_iterations;
  lopt.grad_tolerance = config.grad_tolerance;

  struct StartOutcome {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    bool converged = false;
    bool aborted = false;
  };
  std::vector<StartOutcome> outcomes(total);

  opt::ObjectiveFn fg = [&problem](std::span<const double> x,
                                   std::span<double> g) {
    return problem.value_grad(x, g);
  };

  threads::parallel_for(total, [&](size_t si) {
    std::vector<double> x0(dim);
    size_t rem = si;
    for (size_t j = dim; j-- > 0;) {
      const auto& g = *grids[j];
      x0[j] = g[rem % g.size()];
      rem /= g.size();
    }
    opt::LbfgsResult r = opt::minimize_bounded(fg, x0, lower, upper, lopt);
    StartOutcome& out = outcomes[si];
    out.aborted = r.aborted || !std::isfinite(r.f);
    if (!out.aborted) {
      out.x = std::move(r.x);
      out.f = r.f;
      out.converged = r.converged;
    }
  });

  size_t best = total;
  double best_f = std::numeric_limits<double>::infinity();
  double best_norm = std::numeric_limits<double>::infinity();
  for (size_t si = 0; si < total; ++si) {
    const StartOutcome& o = outcomes[si];
    if (o.aborted) continue;
    double norm = 0;
    for (double v : o.x) norm += v * v;
    norm = std::sqrt(norm);
    if (o.f < best_f || (o.f == best_f && norm < best_norm)) {
      best = si;
      best_f = o.f;
      best_norm = norm;
    }
  }
  if (best == total)
    throw FitFailure("fit: no start produced a finite objective");

  FitResult res;
  res.family = f;
  res.params = laws::unpack_params(f, outcomes[best].x);
  res.objective = best_f;
  res.converged = outcomes[best].converged;
  res.n_starts = static_cast<int>(total);
  res.best_start_index = static_cast<int>(best);
  res.seed_provenance =
      "cartesian init grid, " + std::to_string(total) +
      " starts; bounded quasi-newton (memory 10, strong Wolfe); ties: "
      "objective, then parameter norm, then start index";
  res.starts.resize(total);
  for (size_t si = 0; si < total; ++si) {
    res.starts[si] = {static_cast<int>(si), outcomes[si].f,
                      outcomes[si].converged, outcomes[si].aborted};
  }
  return res;
}

std::string fit_result_to_json(const FitResult& result) {
  json j;
  j["family"] = std::string(laws::family_tag(result.family));
  j["params"] = {{"A", result.params.A},         {"B", result.params.B},
                 {"E", result.params.E},         {"alpha", result.params.alpha},
                 {"beta", result.params.beta},   {"kappa", result.params.kappa}};
  j["objective"] = result.objective;
  j["converged"] = result.converged;
  j["n_starts"] = result.n_starts;
  j["best_start_index"] = result.best_start_index;
  j["seed_provenance"] = result.seed_provenance;
  json starts = json::array();
  for (const StartDiagnostic& s : result.starts) {
    starts.push_back({{"index", s.index},
                      {"objective", s.objective},
                      {"converged", s.converged},
                      {"aborted", s.aborted}});
  }
  j["starts"] = starts;
  return j.dump(2) + "\n";
}

FitResult fit_result_from_json(const std::string& text) {
  json j = json::parse(text);
  FitResult r;
  auto fam = laws::family_from_tag(j.at("family").get<std::string>());
  if (!fam) throw std::invalid_argument("unknown family in fit result");
  r.family = *fam;
  const json& p = j.at("params");
  r.params.A = p.at("A").get<double>();
  r.params.B = p.at("B").get<double>();
  r.params.E = p.at("E").get<double>();
  r.params.alpha = p.at("alpha").get<double>();
  r.params.beta = p.at("beta").get<double>();
  r.params.kappa = p.at("kappa").get<double>();
  r.objective = j.at("objective").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.n_starts = j.at("n_starts").get<int>();
  r.best_start_index = j.at("best_start_index").get<int>();
  r.seed_provenance = j.at("seed_provenance").get<std::string>();
  for (const json& s : j.at("starts")) {
    r.starts.push_back({s.at("index").get<int>(),
                        s.at("objective").get<double>(),
                        s.at("converged").get<bool>(),
                        s.at("aborted").get<bool>()});
  }
  return r;
}

std::vector<double> predict_batch(LawFamily f, const LawParams& params,
                                  std::span<const RunRecord> records,
                                  const L0Table* l0) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const RunRecord& r : records) {
    LawParams q = params;
    if (laws::needs_l0(f)) q.l0_pt = lookup_l0(l0, r.n_params);
    Covariates c{static_cast<double>(r.n_params),
                 static_cast<double>(r.dft_tokens), r.p};
    out.push_back(laws::eval_law(f, q, c));
  }
  return out;
}

std::vector<double> observed_batch(LawFamily f,
                                   std::span<const RunRecord> records,
                                   const L0Table* l0) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const RunRecord& r : records) out.push_back(response_value(f, r, l0));
  return out;
}

} // namespace scalelab::fitting
