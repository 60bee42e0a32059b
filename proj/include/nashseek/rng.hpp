#pragma once
// Deterministic, hierarchically splittable random streams.
//
// Every stochastic routine in this library takes an explicit stream. Streams
// form a tree: child(label) derives a stream that depends only on the parent's
// identity, never on how many values the parent has produced. Replaying a run
// with the same master seed therefore reproduces every draw bit-for-bit, and
// sibling streams can be consumed concurrently.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace nashseek {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_key(std::uint64_t key, std::uint64_t label) {
  std::uint64_t s = key ^ (0x9e3779b97f4a7c15ULL + label * 0xbf58476d1ce4e5b9ULL);
  return splitmix64(s);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ with splitmix-derived seeding and an identity key used only
// for child derivation.
class RngStream {
 public:
  RngStream() : RngStream(0) {}

  explicit RngStream(std::uint64_t seed) {
    reset_from_key(detail::derive_key(0x6e6173687365656bULL, seed));
  }

  // Independent stream addressed by (this stream's identity, label).
  RngStream child(std::uint64_t label) const {
    RngStream s(from_key{}, detail::derive_key(key_, label));
    return s;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform on [-halfwidth, halfwidth].
  double symmetric_uniform(double halfwidth) {
    return halfwidth * (2.0 * next_double() - 1.0);
  }

  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  // 64 signs per underlying draw.
  void fill_rademacher(std::span<double> out) {
    std::size_t i = 0;
    while (i < out.size()) {
      std::uint64_t bits = next_u64();
      const std::size_t chunk = std::min<std::size_t>(64, out.size() - i);
      for (std::size_t k = 0; k < chunk; ++k) {
        out[i + k] = (bits & 1ULL) ? 1.0 : -1.0;
        bits >>= 1;
      }
      i += chunk;
    }
  }

  double gaussian() {
    // Box-Muller; u1 kept away from zero so the log is finite.
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform direction on the unit sphere; dimension 1 reduces to +/-1.
  void unit_sphere(std::span<double> out) {
    for (;;) {
      double sq = 0.0;
      for (double& v : out) {
        v = gaussian();
        sq += v * v;
      }
      if (sq > 1e-300) {
        const double inv = 1.0 / std::sqrt(sq);
        for (double& v : out) v *= inv;
        return;
      }
    }
  }

 private:
  struct from_key {};
  RngStream(from_key, std::uint64_t key) { reset_from_key(key); }

  void reset_from_key(std::uint64_t key) {
    key_ = key;
    std::uint64_t s = key;
    for (auto& w : state_) w = detail::splitmix64(s);
  }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t key_ = 0;
};

}  // namespace nashseek
