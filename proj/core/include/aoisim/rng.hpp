#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace aoisim {

/// Named sub-streams of a run's master seed. Keeping arrivals, channel
/// errors, and contention coins on separate streams means a policy cannot
/// perturb the arrival sample path by drawing more or fewer coins.
enum class StreamId : std::uint64_t {
  arrivals = 1,
  channel = 2,
  contention = 3,
  policy = 4,
};

/// Deterministic seeded RNG stream. Identical (seed, stream, call sequence)
/// yields identical draws on every platform: mt19937_64 is fully specified
/// by the standard and doubles are produced from raw bits, not through
/// distribution objects.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamId stream)
      : RngStream(seed, static_cast<std::uint64_t>(stream)) {}

  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<unsigned>(seed & 0xffffffffu),
                      static_cast<unsigned>(seed >> 32),
                      static_cast<unsigned>(stream & 0xffffffffu),
                      static_cast<unsigned>(stream >> 32)};
    gen_.seed(seq);
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  /// Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be > 0");
    const std::uint64_t threshold = (-n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 gen_;
};

/// Stateless mix for deriving per-replication / per-sweep-point sub-seeds
/// from a master seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace aoisim
