#pragma once

#include <cstdint>
#include <string>

namespace scalelab {

// Training/inference cost estimates overflow int64 for the larger model
// sizes, so these return 128-bit integers.
using u128 = unsigned __int128;

u128 flops_train(uint64_t n_params, uint64_t tokens); // 6 * N * D
u128 flops_infer(uint64_t n_params, uint64_t tokens); // 2 * N * D

std::string u128_to_string(u128 v);
double u128_to_double(u128 v);

} // namespace scalelab
