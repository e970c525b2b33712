#include "scalelab/flops.hpp"

#include <algorithm>
#include <stdexcept>

namespace scalelab {

u128 flops_train(uint64_t n_params, uint64_t tokens) {
  if (n_params == 0 || tokens == 0)
    throw std::invalid_argument("flops_train: arguments must be positive");
  return static_cast<u128>(6) * n_params * tokens;
}

u128 flops_infer(uint64_t n_params, uint64_t tokens) {
  if (n_params == 0 || tokens == 0)
    throw std::invalid_argument("flops_infer: arguments must be positive");
  return static_cast<u128>(2) * n_params * tokens;
}

std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

double u128_to_double(u128 v) {
  return static_cast<double>(v);
}

} // namespace scalelab
