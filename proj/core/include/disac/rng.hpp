#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace disac {

// Deterministic random stream. The engine is std::mt19937_64 (bit-exact by
// the standard); all variate transforms are implemented here rather than via
// std:: distributions, whose output sequences are implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; caches the second deviate.
  double gaussian();

  // Circularly symmetric complex Gaussian, unit variance: E|z|^2 = 1.
  std::complex<double> cgaussian() {
    constexpr double half = 0.5;
    return {gaussian() * std::sqrt(half), gaussian() * std::sqrt(half)};
  }

  // Poisson by inversion; intended for small means (< ~50).
  int poisson(double mean);

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>(uniform() * static_cast<double>(n));
  }

private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Spawns independent named streams from one master seed, so that enabling or
// disabling one stochastic component does not shift the draws of another.
class RngPool {
public:
  explicit RngPool(std::uint64_t master_seed) : master_(master_seed) {}

  Rng stream(std::string_view name) const;
  // Convenience for per-trial streams: "<name>/<index>".
  Rng stream(std::string_view name, std::uint64_t index) const;

  std::uint64_t master_seed() const { return master_; }

private:
  std::uint64_t master_;
};

}  // namespace disac
