#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace iafb {

// Purpose tags keep the channel draw and each user's codebook on separate
// streams, so changing B never perturbs the channel realization.
enum class StreamTag : std::uint64_t {
  kChannel = 1,
  kCodebook = 2,
  kDirection = 3,
  kVerification = 4,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the stream identified by (master seed, trial index, tag, sub).
/// Pure function of its inputs, so trials can run in any order.
inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::uint64_t trial, StreamTag tag,
                                           std::uint64_t sub = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ trial);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return splitmix64(h ^ sub);
}

/// Single-owner random stream. Uniforms are taken from the top 53 bits of a
/// 64-bit Mersenne twister; complex Gaussians use Box-Muller.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_stream(std::uint64_t master, std::uint64_t trial,
                        StreamTag tag, std::uint64_t sub = 0) {
    return Rng(derive_seed(master, trial, tag, sub));
  }

  // [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // (0, 1]
  double uniform_open_zero() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// One CN(0,1) sample: real and imaginary parts independent N(0, 1/2).
  std::complex<double> complex_normal() {
    const double radius = std::sqrt(-std::log(uniform_open_zero()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace iafb
