#pragma once

#include <cstdint>
#include <vector>

namespace cutpaste {

// Seed plus stream selector. Identical (seed, stream) pairs produce an
// identical draw sequence on every platform; see Rng below.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  bool operator==(const RngState&) const = default;
};

// splitmix64 finalizer; bijective on u64.
std::uint64_t mix64(std::uint64_t x);

// Stream for (epoch, sample_index) under a global seed. Distinct pairs map
// to distinct streams for epoch and sample_index below 2^32.
RngState derive_rng(std::uint64_t global_seed, std::uint64_t epoch, std::uint64_t sample_index);

// Same derivation with an extra purpose tag, so unrelated consumers
// (paste draws, pixel batches, data generation) never share a stream.
RngState derive_rng_tagged(std::uint64_t global_seed, std::uint64_t tag, std::uint64_t epoch,
                           std::uint64_t sample_index);

// PCG32 (Melissa O'Neill's pcg32, LCG 64/32 with xorshift-rotate output).
// Chosen over std:: engines because the exact sequence is pinned by this
// implementation, not by a library vendor. All draws below reduce to u32
// arithmetic and are bit-reproducible across platforms.
class Rng {
 public:
  Rng() : Rng(RngState{}) {}
  explicit Rng(RngState s);
  Rng(std::uint64_t seed, std::uint64_t stream) : Rng(RngState{seed, stream}) {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform in [0, bound); bound must be >= 1. Unbiased via rejection.
  std::uint32_t bounded(std::uint32_t bound);

  // Uniform in [0, 1) with 32 bits of resolution.
  double next_double();

  bool bernoulli(double p) { return next_double() < p; }

  // Standard normal via Box-Muller (the second value of each pair is
  // discarded so the generator stays a pure value type).
  double gaussian();
  double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = bounded(static_cast<std::uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
};

}  // namespace cutpaste
