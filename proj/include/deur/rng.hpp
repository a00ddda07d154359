#ifndef DEUR_RNG_HPP
#define DEUR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace deur {

/// SplitMix64 finalizer, used only to derive independent engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seedable 64-bit generator (mt19937_64) with a fixed stream-split rule:
/// stream k of seed s is seeded with splitmix64(splitmix64(s) ^ splitmix64(k + 1)).
/// Chunked Monte-Carlo loops give chunk k its own stream, so the result does
/// not depend on how chunks are scheduled.
///
/// Variates are produced by the transforms below rather than the
/// <random> distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(derive_seed(seed, stream)) {}

  static constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                             std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 1));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second variate of each pair is kept.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Exponential with unit rate.
  double exponential() { return -std::log(uniform_open()); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace deur

#endif  // DEUR_RNG_HPP
