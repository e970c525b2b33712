#include "scalelab/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace scalelab::opt {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct Pair {
  std::vector<double> s, y;
  double rho;
};

class Solver {
public:
  Solver(const ObjectiveFn& fg, std::span<const double> lower,
         std::span<const double> upper, const LbfgsOptions& opts)
      : fg_(fg), lo_(lower.begin(), lower.end()),
        hi_(upper.begin(), upper.end()), opts_(opts), n_(lower.size()) {}

  LbfgsResult run(std::span<const double> x0);

private:
  void project(std::vector<double>& x) const {
    for (size_t i = 0; i < n_; ++i) x[i] = std::clamp(x[i], lo_[i], hi_[i]);
  }

  double eval(const std::vector<double>& x, std::vector<double>& g) {
    ++evals_;
    return fg_(x, g);
  }

  std::vector<double> two_loop(const std::vector<double>& g) const {
    std::vector<double> q(g);
    std::vector<double> alpha(history_.size());
    for (size_t k = history_.size(); k-- > 0;) {
      const Pair& h = history_[k];
      double a = h.rho * dot(h.s, q);
      alpha[k] = a;
      for (size_t i = 0; i < n_; ++i) q[i] -= a * h.y[i];
    }
    if (!history_.empty()) {
      const Pair& h = history_.back();
      double yy = dot(h.y, h.y);
      double gamma = yy > 0 ? dot(h.s, h.y) / yy : 1.0;
      for (double& qi : q) qi *= gamma;
    }
    for (size_t k = 0; k < history_.size(); ++k) {
      const Pair& h = history_[k];
      double b = h.rho * dot(h.y, q);
      for (size_t i = 0; i < n_; ++i) q[i] += (alpha[k] - b) * h.s[i];
    }
    for (double& qi : q) qi = -qi;
    return q;
  }

  // One probe of t -> f(P(x + t*d)). The directional derivative counts
  // only coordinates free to move at the projected point.
  struct Trial {
    double f = 0, dphi = 0;
    std::vector<double> x, g;
    bool finite = false;
  };

  Trial probe(const std::vector<double>& x, const std::vector<double>& d,
              double t) {
    Trial tr;
    tr.x.resize(n_);
    for (size_t i = 0; i < n_; ++i)
      tr.x[i] = std::clamp(x[i] + t * d[i], lo_[i], hi_[i]);
    tr.g.assign(n_, 0.0);
    tr.f = eval(tr.x, tr.g);
    tr.finite = std::isfinite(tr.f) && all_finite(tr.g);
    if (tr.finite) {
      double s = 0;
      for (size_t i = 0; i < n_; ++i) {
        bool free = (tr.x[i] > lo_[i] && tr.x[i] < hi_[i]) ||
                    (tr.x[i] == lo_[i] && d[i] > 0) ||
                    (tr.x[i] == hi_[i] && d[i] < 0);
        if (free) s += tr.g[i] * d[i];
      }
      tr.dphi = s;
    }
    return tr;
  }

  const ObjectiveFn& fg_;
  std::vector<double> lo_, hi_;
  LbfgsOptions opts_;
  size_t n_;
  std::deque<Pair> history_;
  int evals_ = 0;
};

LbfgsResult Solver::run(std::span<const double> x0) {
  const double c1 = opts_.c1, c2 = opts_.c2;
  LbfgsResult res;
  std::vector<double> x(x0.begin(), x0.end());
  project(x);
  std::vector<double> g(n_, 0.0);
  double f = eval(x, g);
  if (!std::isfinite(f) || !all_finite(g)) {
    res.x = std::move(x);
    res.f = f;
    res.n_evals = evals_;
    res.aborted = true;
    return res;
  }

  int iter = 0;
  for (; iter < opts_.max_iterations; ++iter) {
    double pg_inf = 0;
    for (size_t i = 0; i < n_; ++i) {
      double moved = std::clamp(x[i] - g[i], lo_[i], hi_[i]);
      pg_inf = std::max(pg_inf, std::abs(x[i] - moved));
    }
    if (pg_inf <= opts_.grad_tolerance) {
      res.converged = true;
      break;
    }

    std::vector<double> d = two_loop(g);
    if (dot(d, g) > -1e-12 * norm2(d) * norm2(g)) {
      for (size_t i = 0; i < n_; ++i) d[i] = -g[i];
    }
    const double f0 = f;
    const double dphi0 = dot(g, d);

    double gmax = 0;
    for (double gi : g) gmax = std::max(gmax, std::abs(gi));
    double t = iter == 0 ? std::min(1.0, 1e2 / std::max(1.0, gmax)) : 1.0;

    // Bracketing phase of a strong-Wolfe search.
    bool accepted = false;
    Trial acc;
    double f_prev = f0;
    double lo_t = 0, hi_t = 0, f_lo = f0;
    bool have_bracket = false;
    for (int ls = 0; ls < 30; ++ls) {
      Trial tr = probe(x, d, t);
      if (!tr.finite) break; // fall through to backtracking
      if (tr.f > f0 + c1 * t * dphi0 || (ls > 0 && tr.f >= f_prev)) {
        hi_t = t;
        have_bracket = true;
        break;
      }
      if (std::abs(tr.dphi) <= -c2 * dphi0) {
        acc = std::move(tr);
        accepted = true;
        break;
      }
      if (tr.dphi >= 0) {
        hi_t = lo_t;
        lo_t = t;
        f_lo = tr.f;
        have_bracket = true;
        break;
      }
      lo_t = t;
      f_lo = tr.f;
      f_prev = tr.f;
      t *= 2.0;
    }

    if (!accepted && have_bracket) {
      for (int z = 0; z < 25; ++z) {
        t = 0.5 * (lo_t + hi_t);
        Trial tr = probe(x, d, t);
        if (!tr.finite) {
          hi_t = t;
          continue;
        }
        if (tr.f > f0 + c1 * t * dphi0 || tr.f >= f_lo) {
          hi_t = t;
        } else {
          if (std::abs(tr.dphi) <= -c2 * dphi0) {
            acc = std::move(tr);
            accepted = true;
            break;
          }
          if (tr.dphi * (hi_t - lo_t) >= 0) hi_t = lo_t;
          lo_t = t;
          f_lo = tr.f;
        }
        if (std::abs(hi_t - lo_t) < 1e-16) break;
      }
      if (!accepted && lo_t > 0) {
        // Settle for the best sufficient-decrease point found.
        Trial tr = probe(x, d, lo_t);
        if (tr.finite) {
          acc = std::move(tr);
          accepted = true;
        }
      }
    }

    if (!accepted) {
      // Plain backtracking; insist on actually moving.
      t = 1.0;
      for (int z = 0; z < 40; ++z) {
        Trial tr = probe(x, d, t);
        if (tr.finite && tr.f <= f0 + c1 * t * dphi0 && tr.x != x) {
          acc = std::move(tr);
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break; // stuck: report the current iterate
    }

    std::vector<double> s(n_), y(n_);
    for (size_t i = 0; i < n_; ++i) {
      s[i] = acc.x[i] - x[i];
      y[i] = acc.g[i] - g[i];
    }
    double sy = dot(s, y);
    if (sy > 1e-10 * norm2(s) * norm2(y)) {
      history_.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(history_.size()) > opts_.memory)
        history_.pop_front();
    }
    x = std::move(acc.x);
    g = std::move(acc.g);
    f = acc.f;
  }

  res.x = std::move(x);
  res.f = f;
  res.iterations = iter;
  res.n_evals = evals_;
  return res;
}

} // namespace

LbfgsResult minimize_bounded(const ObjectiveFn& fg, std::span<const double> x0,
                             std::span<const double> lower,
                             std::span<const double> upper,
                             const LbfgsOptions& options) {
  Solver solver(fg, lower, upper, options);
  return solver.run(x0);
}

} // namespace scalelab::opt
