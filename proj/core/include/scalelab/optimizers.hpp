#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace scalelab::optimizers {

enum class Variant { adam, adamw, anchored_adamw };

std::string_view variant_tag(Variant v);

struct OptimizerConfig {
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lambda = 0; // decay strength; 0 means the decay path is skipped
};

struct OptimizerState {
  std::vector<double> theta;
  std::vector<double> theta0; // anchor, fixed at initialization
  std::vector<double> m, v;
  uint64_t t = 0;
};

OptimizerState make_state(std::span<const double> theta0);

// One bias-corrected Adam update. The decoupled decay is applied as a
// proximal shrink after the Adam move: adamw contracts toward zero,
// anchored_adamw toward theta0. With lambda == 0 both reduce to adam
// and the shrink is not applied at all, keeping the iterates bit-equal.
void step(Variant variant, const OptimizerConfig& config,
          OptimizerState& state, std::span<const double> grad);

// Bias-corrected step direction m_hat / (sqrt(v_hat) + eps) for the
// current state; at a fixed point of anchored_adamw this balances
// lambda * (theta - theta0).
std::vector<double> step_direction(const OptimizerConfig& config,
                                   const OptimizerState& state);

struct ToyPoint {
  uint64_t step = 0;
  double x = 0, y = 0;
  double f = 0;
};

// Quadratic bowl centered at (2, -3), gradient descent driver for the
// optimizer variants. The trajectory includes the starting point.
std::vector<ToyPoint> run_toy_quadratic(Variant variant, double lambda,
                                        uint64_t steps = 100, double lr = 0.1,
                                        std::array<double, 2> start = {4, 4});

void write_trajectory_csv(const std::string& path,
                          std::span<const ToyPoint> points);

} // namespace scalelab::optimizers
