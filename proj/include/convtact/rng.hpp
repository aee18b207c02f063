#pragma once

#include <cstdint>

namespace convtact {

// xoshiro256** (Blackman & Vigna), state seeded by splitmix64. The output
// stream depends only on the seed, so fixtures reproduce on every platform:
//
//   splitmix64:  z = (s += 0x9e3779b97f4a7c15)
//                z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//                z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//                return z ^ (z >> 31)
//   xoshiro256**: result = rotl(s1 * 5, 7) * 9
//                t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3
//                s2 ^= t; s3 = rotl(s3, 45)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

 private:
  std::uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace convtact
