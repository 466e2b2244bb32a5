#pragma once

#include <cstdint>

namespace ppcb {

/// What a random draw is used for. Each purpose gets its own stream so that,
/// for example, the explore coin of round t never depends on how many clicks
/// were sampled before it.
enum class Purpose : std::uint64_t {
  kContext = 1,
  kExploreCoin = 2,
  kExploreArm = 3,
  kClick = 4,
  kAdversary = 5,
  kInstance = 6,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Counter-based stream keyed by (seed, round, purpose). Two streams with the
/// same key always produce the same sequence.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t round, Purpose purpose)
      : state_(splitmix64(seed ^ splitmix64(round ^ splitmix64(static_cast<std::uint64_t>(purpose))))) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Lemire's multiply-shift; the bias is below
  /// 2^-32 for every n this library uses.
  std::uint64_t below(std::uint64_t n) {
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(next()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

/// Hands out the per-purpose streams of a single round.
class RoundStreams {
 public:
  RoundStreams(std::uint64_t seed, std::uint64_t round) : seed_(seed), round_(round) {}

  Stream stream(Purpose purpose) const { return Stream(seed_, round_, purpose); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t round() const { return round_; }

 private:
  std::uint64_t seed_;
  std::uint64_t round_;
};

}  // namespace ppcb
