#include "scalelab/optimizers.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "scalelab/io.hpp"

namespace scalelab::optimizers {

std::string_view variant_tag(Variant v) {
  switch (v) {
    case Variant::adam: return "adam";
    case Variant::adamw: return "adamw";
    case Variant::anchored_adamw: return "anchored_adamw";
  }
  return "unknown";
}

OptimizerState make_state(std::span<const double> theta0) {
  OptimizerState s;
  s.theta.assign(theta0.begin(), theta0.end());
  s.theta0 = s.theta;
  s.m.assign(theta0.size(), 0.0);
  s.v.assign(theta0.size(), 0.0);
  return s;
}

void step(Variant variant, const OptimizerConfig& config,
          OptimizerState& state, std::span<const double> grad) {
  size_t n = state.theta.size();
  if (grad.size() != n)
    throw std::invalid_argument("step: gradient dimension mismatch");
  for (double g : grad)
    if (!std::isfinite(g))
      throw std::runtime_error("step: non-finite gradient at step " +
                               std::to_string(state.t + 1));

  state.t += 1;
  double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  double shrink = 1.0 + config.lr * config.lambda;

  for (size_t i = 0; i < n; ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grad[i];
    state.v[i] =
        config.beta2 * state.v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
    double m_hat = state.m[i] / bc1;
    double v_hat = state.v[i] / bc2;
    double theta_prime =
        state.theta[i] - config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    if (config.lambda == 0 || variant == Variant::adam) {
      state.theta[i] = theta_prime;
    } else if (variant == Variant::adamw) {
      state.theta[i] = theta_prime / shrink;
    } else {
      state.theta[i] =
          state.theta0[i] + (theta_prime - state.theta0[i]) / shrink;
    }
  }
}

std::vector<double> step_direction(const OptimizerConfig& config,
                                   const OptimizerState& state) {
  if (state.t == 0)
    throw std::invalid_argument("step_direction: no steps taken yet");
  double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  std::vector<double> u(state.theta.size());
  for (size_t i = 0; i < u.size(); ++i) {
    double m_hat = state.m[i] / bc1;
    double v_hat = state.v[i] / bc2;
    u[i] = m_hat / (std::sqrt(v_hat) + config.eps);
  }
  return u;
}

std::vector<ToyPoint> run_toy_quadratic(Variant variant, double lambda,
                                        uint64_t steps, double lr,
                                        std::array<double, 2> start) {
  OptimizerConfig config;
  config.lr = lr;
  config.lambda = lambda;
  OptimizerState state = make_state(start);

  auto value = [](double x, double y) {
    return (x - 2.0) * (x - 2.0) + (y + 3.0) * (y + 3.0);
  };

  std::vector<ToyPoint> out;
  out.reserve(steps + 1);
  out.push_back({0, state.theta[0], state.theta[1],
                 value(state.theta[0], state.theta[1])});
  for (uint64_t s = 1; s <= steps; ++s) {
    double g[2] = {2.0 * (state.theta[0] - 2.0),
                   2.0 * (state.theta[1] + 3.0)};
    step(variant, config, state, g);
    out.push_back({s, state.theta[0], state.theta[1],
                   value(state.theta[0], state.theta[1])});
  }
  return out;
}

void write_trajectory_csv(const std::string& path,
                          std::span<const ToyPoint> points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::ParseError("cannot write " + path);
  out << "step,x,y,f\n";
  for (const ToyPoint& p : points)
    out << p.step << "," << io::fmt_double(p.x) << "," << io::fmt_double(p.y)
        << "," << io::fmt_double(p.f) << "\n";
}

} // namespace scalelab::optimizers

