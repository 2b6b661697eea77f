#include "disac/rng.hpp"

#include <cmath>

namespace disac {
namespace {

// FNV-1a over the stream name, then splitmix64 to decorrelate from the
// master seed. Stable across platforms.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

double Rng::gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

int Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  const double l = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform();
  } while (p > l);
  return k - 1;
}

Rng RngPool::stream(std::string_view name) const {
  return Rng(splitmix64(master_ ^ fnv1a(name)));
}

Rng RngPool::stream(std::string_view name, std::uint64_t index) const {
  return Rng(splitmix64(splitmix64(master_ ^ fnv1a(name)) + index));
}

}  // namespace disac
