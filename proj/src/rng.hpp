#pragma once

#include <cstdint>
#include <random>

#include "types.hpp"

namespace otcpd {

// SplitMix64 step; used to derive independent sub-stream seeds from a run
// seed. The mt19937_64 engine itself is fully specified by the standard, and
// all samplers below consume raw engine words only, so every stream is
// bit-identical across platforms.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed for sub-stream `index` of run seed `seed` (stream 0 is the run itself).
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0,1) with 53 random bits.
  double uniform01();

  // Standard normal via Marsaglia polar; one spare is cached.
  double normal();

  double laplace(double loc, double scale);
  double cauchy(double loc, double scale);

  // Marsaglia-Tsang; valid for any shape > 0.
  double gamma(double shape, double rate);

  // Uniform over the closed Euclidean ball B(0, radius) in dimension d.
  Vector uniform_in_ball(long d, double radius);

  std::uint64_t raw() { return eng_(); }

private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace otcpd
