#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace darkstore {

// Seed derivation scheme (bit-exact, language independent):
//   digest  = FNV-1a 64 over the UTF-8 bytes of the label
//   derived = splitmix64_mix(root ^ digest)
// Streams are SplitMix64 generators started from the derived value.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64_mix(std::uint64_t z);
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

// SplitMix64 stream with portable distributions. Satisfies
// UniformRandomBitGenerator so it also works with <algorithm> shuffles.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();

  // 53-bit uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Box-Muller; consumes two uniforms per call.
  double normal(double mean = 0.0, double stddev = 1.0);
  // Inversion by sequential search; large means are split into chunks of at
  // most 16 so the search stays well conditioned.
  std::uint64_t poisson(double mean);

  // Independent child stream keyed by label; does not advance this stream.
  Rng substream(std::string_view label) const { return Rng(derive_seed(state_, label)); }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace darkstore
