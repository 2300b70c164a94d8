#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace augmod {

// splitmix64 finalizer; bijective 64-bit mixer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Counter-based generator (splitmix64). The whole toolkit draws randomness
// from streams derived with derive_rng, so any example / epoch / layer can be
// regenerated in isolation and results do not depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // [0,1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  // inclusive bounds
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // standard normal via Box-Muller, second value cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0,1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Independent stream keyed by (master seed, path). Used with the tags below so
// every consumer of randomness has its own addressable stream.
inline Rng derive_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(master ^ 0x5851f42d4c957f2dULL);
  for (std::uint64_t v : path) {
    s ^= mix64(v) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    s = mix64(s);
  }
  return Rng(s);
}

namespace stream {
inline constexpr std::uint64_t kExample = 0x01;
inline constexpr std::uint64_t kInit = 0x02;
inline constexpr std::uint64_t kShuffle = 0x03;
inline constexpr std::uint64_t kDropout = 0x04;
inline constexpr std::uint64_t kBatchLength = 0x05;
}  // namespace stream

}  // namespace augmod
