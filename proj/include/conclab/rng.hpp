#pragma once

#include <cstdint>

namespace conclab {

// SplitMix64 finalizer; the mixing step behind every seeded stream.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Identifies one independent random stream. Replications of an experiment
// get consecutive `replication` values; `stream` separates independent uses
// inside one replication (permutation draw, birth times, ...).
struct SeedTuple {
  std::uint64_t master = 0;
  std::uint64_t replication = 0;
  std::uint64_t stream = 0;

  SeedTuple with_replication(std::uint64_t r) const { return {master, r, stream}; }
  SeedTuple with_stream(std::uint64_t s) const { return {master, replication, s}; }
};

// Counter-based generator: the i-th output is a pure function of (key, i),
// so results do not depend on scheduling and replications can run on any
// executor in any order.
class CounterRng {
 public:
  explicit CounterRng(const SeedTuple& s) {
    std::uint64_t k = mix64(s.master + 0x9e3779b97f4a7c15ULL);
    k = mix64(k ^ (s.replication + 0x632be59bd9b4e019ULL));
    key_ = mix64(k ^ (s.stream + 0x85ebca6b2b2ae35ULL));
  }

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound), unbiased via rejection. bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t reject_under = (~bound + 1) % bound;  // 2^64 mod bound
    std::uint64_t r = next_u64();
    while (r < reject_under) r = next_u64();
    return r % bound;
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// Stream ids used across the library. Keeping them in one place guarantees
// two subsystems never consume the same stream of one replication.
namespace streams {
inline constexpr std::uint64_t kEdgePermutation = 1;
inline constexpr std::uint64_t kBirthTimes = 2;
inline constexpr std::uint64_t kProcessChoices = 3;
inline constexpr std::uint64_t kGnpSample = 4;
inline constexpr std::uint64_t kPerturbation = 5;
inline constexpr std::uint64_t kSpaceGenerator = 6;
inline constexpr std::uint64_t kEvent = 7;
}  // namespace streams

}  // namespace conclab
