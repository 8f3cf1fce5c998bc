#include "cutpaste/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cutpaste {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngState derive_rng(std::uint64_t global_seed, std::uint64_t epoch, std::uint64_t sample_index) {
  return derive_rng_tagged(global_seed, 0, epoch, sample_index);
}

RngState derive_rng_tagged(std::uint64_t global_seed, std::uint64_t tag, std::uint64_t epoch,
                           std::uint64_t sample_index) {
  // (epoch, sample_index) packs injectively for values below 2^32; the
  // bijective mix keeps distinct pairs on distinct streams.
  const std::uint64_t packed = (epoch << 32) ^ (sample_index & 0xffffffffULL) ^ (sample_index >> 32);
  return RngState{global_seed, mix64(packed + tag * 0x9e3779b97f4a7c15ULL)};
}

Rng::Rng(RngState s) {
  // pcg32_srandom: stream selects the (odd) increment, seed the start state.
  inc_ = (s.stream << 1u) | 1u;
  state_ = 0;
  next_u32();
  state_ += s.seed;
  next_u32();
}

std::uint32_t Rng::next_u32() {
  const std::uint64_t old = state_;
  state_ = old * 6364136223846793005ULL + inc_;
  const std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

std::uint32_t Rng::bounded(std::uint32_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("Rng::bounded: bound must be >= 1");
  }
  // Rejection threshold = (2^32 - bound) % bound.
  const std::uint32_t threshold = (0u - bound) % bound;
  for (;;) {
    const std::uint32_t r = next_u32();
    if (r >= threshold) return r % bound;
  }
}

double Rng::next_double() { return next_u32() * 0x1p-32; }

double Rng::gaussian() {
  // u1 shifted away from zero so log() stays finite.
  const double u1 = (next_u32() + 1.0) * 0x1p-32;
  const double u2 = next_u32() * 0x1p-32;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace cutpaste
