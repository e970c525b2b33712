#pragma once

#include <functional>
#include <span>
#include <vector>

namespace scalelab::opt {

// Objective callback: returns f(x) and fills grad. Both spans have the
// problem dimension.
using ObjectiveFn =
    std::function<double(std::span<const double>, std::span<double>)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 500;
  double grad_tolerance = 1e-9; // infinity norm of the projected gradient
  double c1 = 1e-4;             // sufficient-decrease constant
  double c2 = 0.9;              // curvature constant
};

struct LbfgsResult {
  std::vector<double> x;
  double f = 0;
  int iterations = 0;
  int n_evals = 0;
  bool converged = false;
  bool aborted = false; // non-finite objective or gradient encountered
};

// Box-constrained limited-memory BFGS. Iterates are kept feasible by
// projection; the line search runs on f(P(x + t * d)) with the
// directional derivative taken over coordinates free to move.
LbfgsResult minimize_bounded(const ObjectiveFn& fg, std::span<const double> x0,
                             std::span<const double> lower,
                             std::span<const double> upper,
                             const LbfgsOptions& options = {});

} // namespace scalelab::opt
