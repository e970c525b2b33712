#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>

namespace scalelab::rng {

// Counter-based generator (Philox4x32-10). Streams are addressed, not
// advanced: SubStream(seed, label, index) yields the same draws no matter
// which other streams were consumed before it.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 2> key,
                                   std::array<uint32_t, 4> counter);

uint32_t fnv1a32(std::string_view s);

class SubStream {
public:
  SubStream(uint64_t seed, std::string_view label, uint64_t index);

  uint64_t next_u64();
  // 53-bit mantissa draw in [0, 1)
  double uniform();
  // Box-Muller pair; consumes exactly two uniforms
  std::pair<double, double> normal_pair();
  // unbiased-enough fixed-point map of one u64 onto [0, n)
  uint64_t bounded(uint64_t n);

private:
  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 3> prefix_;
  uint32_t block_ = 0;
  std::array<uint64_t, 2> buffer_{};
  int available_ = 0;
};

} // namespace scalelab::rng
