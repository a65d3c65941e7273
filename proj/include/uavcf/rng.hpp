#pragma once

#include <cstdint>
#include <complex>
#include <string>
#include <string_view>

namespace uavcf {

/// Counter-free deterministic random generator with named substreams.
///
/// All sampling in the simulator flows through this class instead of the
/// <random> distributions, whose output sequences differ between standard
/// library implementations. Streams derived with the same (seed, name, index)
/// produce identical sequences on every platform, which is what makes
/// experiment outputs byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x853c49e6748fea9bULL) {
    // Warm up so that small seeds do not produce correlated leading draws.
    next_u64();
    next_u64();
  }

  /// Independent substream for a named component (e.g. "fronthaul").
  Rng stream(std::string_view name) const {
    return Rng(splitmix(state_ ^ fnv1a(name)));
  }

  /// Independent substream for a trial or worker index.
  Rng stream(std::uint64_t index) const {
    return Rng(splitmix(state_ ^ (0x9e3779b97f4a7c15ULL + index)));
  }

  std::uint64_t next_u64() {
    // xorshift* keeps the generator self-contained and portable.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dULL;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached spare, keeps streams splittable).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Circularly-symmetric complex normal with E{|x|^2} = 1.
  std::complex<double> cnormal() {
    const double m = 0.7071067811865476;  // 1/sqrt(2)
    return {m * normal(), m * normal()};
  }

  /// Uniform phase factor exp(j*theta), theta ~ U[0, 2*pi).
  std::complex<double> phase() {
    const double t = uniform(0.0, 2.0 * 3.14159265358979323846);
    return {std::cos(t), std::sin(t)};
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t state_;
};

}  // namespace uavcf
