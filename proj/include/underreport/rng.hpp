#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace underreport {

// SplitMix64 finalizer.  Used to derive decorrelated seeds for child streams
// (restarts, bootstrap replicates, experiment cells) from one master seed.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

// Stream tags for derive_seed.  Arbitrary distinct constants; changing them
// changes every seeded result, so they are fixed here once.
namespace stream {
inline constexpr std::uint64_t kRestart = 0x7265737461727430ULL;
inline constexpr std::uint64_t kBootResample = 0x626f6f7472657331ULL;
inline constexpr std::uint64_t kBootFit = 0x626f6f7466697432ULL;
inline constexpr std::uint64_t kExperimentCell = 0x6578706363656c6cULL;
inline constexpr std::uint64_t kExperimentData = 0x6578706464617461ULL;
inline constexpr std::uint64_t kExperimentAdj = 0x65787066697461ULL;
inline constexpr std::uint64_t kExperimentUnadj = 0x65787066697475ULL;
}  // namespace stream

// Deterministic generator with its own distribution code.  The standard
// library leaves distribution algorithms unspecified, so seeded results would
// not be reproducible across toolchains if we used std::normal_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform on [0, 1), 53-bit resolution
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // standard normal via Box-Muller, one cached draw
  double normal() {
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    cache_ = r * std::sin(two_pi * u2);
    has_cache_ = true;
    return r * std::cos(two_pi * u2);
  }

  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  // uniform integer in [0, n), n >= 1; rejection keeps it unbiased
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
  double cache_ = 0.0;
  bool has_cache_ = false;
};

}  // namespace underreport
