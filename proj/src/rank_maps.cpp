#include "rank_maps.hpp"

#include <cmath>
#include <vector>

#include "rng.hpp"

namespace otcpd::ranks {

namespace {

std::vector<long> first_primes(long k) {
  std::vector<long> ps;
  for (long x = 2; static_cast<long>(ps.size()) < k; ++x) {
    bool prime = true;
    for (long p : ps) {
      if (p * p > x) break;
      if (x % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) ps.push_back(x);
  }
  return ps;
}

double radical_inverse(long base, long i) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

ReferenceSet sample_reference(long n, long d, RefScheme scheme, std::uint64_t seed) {
  if (n < 1 || d < 1) throw ArgumentError("sample_reference: need n >= 1 and d >= 1");
  ReferenceSet out;
  out.scheme = scheme;
  out.seed = seed;
  out.points.resize(n, d);
  if (scheme == RefScheme::IidUniform) {
    Rng rng(derive_stream(seed, 0));
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < d; ++j) out.points(i, j) = rng.uniform01();
    }
  } else {
    const std::vector<long> bases = first_primes(d);
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < d; ++j) out.points(i, j) = radical_inverse(bases[j], i + 1);
    }
  }
  return out;
}

RankMapping hard_rank_map(const Matrix& pooled, const ReferenceSet& ref, long split_m) {
  if (pooled.rows() != ref.points.rows()) {
    throw ArgumentError("hard_rank_map: pooled count must equal reference count");
  }
  const Matrix cost = ot::build_cost_matrix(pooled, ref.points);
  ot::Assignment asg = ot::exact_assignment(cost);
  RankMapping out;
  out.soft = false;
  out.split_m = split_m < 0 ? pooled.rows() : split_m;
  out.split_n = pooled.rows() - out.split_m;
  out.images.resize(pooled.rows(), pooled.cols());
  for (long i = 0; i < pooled.rows(); ++i) out.images.row(i) = ref.points.row(asg.perm[i]);
  out.perm = std::move(asg.perm);
  return out;
}

RankMapping soft_rank_map(const Matrix& pooled, const ReferenceSet& ref,
                          double epsilon, long split_m,
                          const ot::SinkhornOptions& opts) {
  if (pooled.rows() != ref.points.rows()) {
    throw ArgumentError("soft_rank_map: pooled count must equal reference count");
  }
  if (!(epsilon > 0.0)) throw ArgumentError("soft_rank_map: epsilon must be > 0");
  const long n = pooled.rows();
  const Matrix cost = ot::build_cost_matrix(pooled, ref.points);
  const Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  ot::SinkhornPotentials pot = ot::sinkhorn_potentials(cost, w, w, epsilon, opts);

  // images_i = sum_j U_j exp((g_j - C_ij)/eps) / sum_j exp((g_j - C_ij)/eps);
  // f cancels in the normalization, so the map is a Gibbs barycenter in x.
  Matrix wgt = ((-cost).rowwise() + pot.g.transpose()) / pot.epsilon;
  const Vector row_max = wgt.rowwise().maxCoeff();
  wgt = ((wgt.colwise() - row_max)).array().exp().matrix();
  const Vector row_sum = wgt.rowwise().sum();

  RankMapping out;
  out.soft = true;
  out.epsilon = pot.epsilon;
  out.converged = pot.converged;
  out.split_m = split_m < 0 ? n : split_m;
  out.split_n = n - out.split_m;
  out.images = wgt * ref.points;
  out.images.array().colwise() /= row_sum.array();
  return out;
}

}  // namespace otcpd::ranks
