#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cfbeam {

// Deterministic random source. Raw bits come from std::mt19937_64 (a fully
// specified generator); all distributions are derived here from the raw
// 64-bit stream, so a seed reproduces identically on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on (0, 1].
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53;
  }

  // Uniform on [0, 1).
  double uniform_half_open() {
    return static_cast<double>(gen_() >> 11) * 0x1p-53;
  }

  // Standard normal via Box-Muller; one spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * M_PI * uniform_half_open();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly-symmetric complex normal CN(0, 1): E|z|^2 = 1.
  std::complex<double> cnormal() {
    const double r = std::sqrt(-std::log(uniform()));
    const double a = 2.0 * M_PI * uniform_half_open();
    return {r * std::cos(a), r * std::sin(a)};
  }

  // Independent stream derivation (splitmix64 over the pair). Adding more
  // indices never perturbs streams derived for earlier ones.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cfbeam
