#include "scalelab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace scalelab::rng {

namespace {

constexpr uint32_t kMulA = 0xD2511F53u;
constexpr uint32_t kMulB = 0xCD9E8D57u;
constexpr uint32_t kWeylA = 0x9E3779B9u;
constexpr uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t prod = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(prod >> 32);
  lo = static_cast<uint32_t>(prod);
}

inline std::array<uint32_t, 4> round_once(std::array<uint32_t, 2> key,
                                          std::array<uint32_t, 4> c) {
  uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMulA, c[0], hi0, lo0);
  mulhilo(kMulB, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ key[0], lo1, hi0 ^ c[3] ^ key[1], lo0};
}

} // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 2> key,
                                   std::array<uint32_t, 4> counter) {
  for (int r = 0; r < 10; ++r) {
    counter = round_once(key, counter);
    if (r < 9) {
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
  }
  return counter;
}

uint32_t fnv1a32(std::string_view s) {
  uint32_t h = 2166136261u;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 16777619u;
  }
  return h;
}

SubStream::SubStream(uint64_t seed, std::string_view label, uint64_t index) {
  key_ = {static_cast<uint32_t>(seed & 0xFFFFFFFFu),
          static_cast<uint32_t>(seed >> 32)};
  prefix_ = {fnv1a32(label), static_cast<uint32_t>(index & 0xFFFFFFFFu),
             static_cast<uint32_t>(index >> 32)};
}

uint64_t SubStream::next_u64() {
  if (available_ == 0) {
    auto out = philox4x32(key_, {prefix_[0], prefix_[1], prefix_[2], block_});
    ++block_;
    buffer_[0] = (static_cast<uint64_t>(out[0]) << 32) | out[1];
    buffer_[1] = (static_cast<uint64_t>(out[2]) << 32) | out[3];
    available_ = 2;
  }
  uint64_t v = buffer_[2 - available_];
  --available_;
  return v;
}

double SubStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::pair<double, double> SubStream::normal_pair() {
  double u1 = uniform();
  double u2 = uniform();
  // log1p(-u1) keeps the argument away from log(0) when u1 == 0
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  double t = 2.0 * M_PI * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

uint64_t SubStream::bounded(uint64_t n) {
  if (n == 0) throw std::invalid_argument("bounded: n must be positive");
  unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<uint64_t>(wide >> 64);
}

} // namespace scalelab::rng
