#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace kacgc {

/// SplitMix64 mixer; used both as a seed expander and for deriving
/// per-replica stream seeds from (seed, replica).
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t s) : state(s) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256++ with explicitly coded sampling transforms, so that every
/// stream is reproducible bit-for-bit across platforms and thread counts
/// (std::normal_distribution and friends are implementation-defined).
///
/// Stream derivation: state words are the first four SplitMix64 outputs of
/// mix(seed, stream_id); stream_id 0 is the root stream, replica r uses
/// stream_id r+1.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    SplitMix64 sm(seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1)));
    for (auto& w : s_) w = sm.next();
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t uniform_below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection of the biased zone.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0ULL - n) % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  /// Standard normal via Marsaglia polar; one spare value cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, r2;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  /// Poisson(mean) by chunked Knuth products (chunks keep e^-chunk well
  /// inside double range for means up to ~10^3 used here).
  long poisson(double mean) {
    long total = 0;
    double remaining = mean;
    constexpr double chunk = 16.0;
    while (remaining > 0.0) {
      const double lam = remaining > chunk ? chunk : remaining;
      const double limit = std::exp(-lam);
      double prod = 1.0;
      long k = -1;
      do {
        prod *= uniform();
        ++k;
      } while (prod > limit);
      total += k;
      remaining -= lam;
    }
    return total;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace kacgc
