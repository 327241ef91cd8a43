#include "rng.hpp"

#include <cmath>

namespace otcpd {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  (void)splitmix64(s);
  s ^= 0x9e3779b97f4a7c15ull * (index + 1);
  (void)splitmix64(s);
  return splitmix64(s);
}

double Rng::uniform01() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double k = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * k;
  has_spare_ = true;
  return u * k;
}

double Rng::laplace(double loc, double scale) {
  double u;
  do {
    u = uniform01() - 0.5;
  } while (u == -0.5);
  const double sgn = (u < 0.0) ? -1.0 : 1.0;
  return loc - scale * sgn * std::log1p(-2.0 * std::fabs(u));
}

double Rng::cauchy(double loc, double scale) {
  double u;
  do {
    u = uniform01();
  } while (u == 0.0);
  return loc + scale * std::tan(M_PI * (u - 0.5));
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw ArgumentError("gamma: shape and rate must be positive");
  }
  if (shape < 1.0) {
    // Boost: Gamma(shape) = Gamma(shape+1) * U^(1/shape).
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v / rate;
    }
  }
}

Vector Rng::uniform_in_ball(long d, double radius) {
  Vector z(d);
  double norm2;
  do {
    for (long k = 0; k < d; ++k) z[k] = normal();
    norm2 = z.squaredNorm();
  } while (norm2 == 0.0);
  const double r = radius * std::pow(uniform01(), 1.0 / static_cast<double>(d));
  return z * (r / std::sqrt(norm2));
}

}  // namespace otcpd
