#include "gof.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rng.hpp"

namespace otcpd::gof {

namespace {

// Clamp tiny negative cancellation noise; anything beyond the tolerance is an
// internal inconsistency, not noise.
double clamp_nonnegative(double v, double scale, double rel_tol = 1e-10) {
  if (v >= 0.0) return v;
  if (v >= -rel_tol * scale) return 0.0;
  throw NumericError("statistic came out negative beyond tolerance: " +
                     std::to_string(v));
}

Matrix distance_matrix(const Matrix& x, const Matrix& y) {
  return (2.0 * ot::build_cost_matrix(x, y)).cwiseSqrt();
}

double sum_cross_distances(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (long i = 0; i < a.rows(); ++i) {
    for (long j = 0; j < b.rows(); ++j) {
      s += (a.row(i) - b.row(j)).norm();
    }
  }
  return s;
}

void check_two_sample(const Matrix& x, const Matrix& y, const char* who) {
  if (x.rows() < 1 || y.rows() < 1) {
    throw ArgumentError(std::string(who) + ": both samples must be non-empty");
  }
  if (x.cols() != y.cols()) {
    throw ArgumentError(std::string(who) + ": dimension mismatch");
  }
}

Matrix pool_rows(const Matrix& x, const Matrix& y) {
  Matrix pooled(x.rows() + y.rows(), x.cols());
  pooled.topRows(x.rows()) = x;
  pooled.bottomRows(y.rows()) = y;
  return pooled;
}

// Replace images of exactly-equal pooled rows by their group barycenter.
// An assignment cannot give duplicates a common image, but the limiting map
// of the entropic one does exactly this, and it is what makes the rank energy
// vanish on identical sample lists.
void average_duplicate_images(const Matrix& pooled, Matrix& images) {
  const long n = pooled.rows();
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0L);
  auto row_less = [&](long a, long b) {
    for (long k = 0; k < pooled.cols(); ++k) {
      if (pooled(a, k) < pooled(b, k)) return true;
      if (pooled(a, k) > pooled(b, k)) return false;
    }
    return false;
  };
  auto row_eq = [&](long a, long b) {
    for (long k = 0; k < pooled.cols(); ++k) {
      if (pooled(a, k) != pooled(b, k)) return false;
    }
    return true;
  };
  std::sort(order.begin(), order.end(), row_less);
  long start = 0;
  while (start < n) {
    long end = start + 1;
    while (end < n && row_eq(order[start], order[end])) ++end;
    if (end - start > 1) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(images.cols());
      for (long k = start; k < end; ++k) mean += images.row(order[k]);
      mean /= static_cast<double>(end - start);
      for (long k = start; k < end; ++k) images.row(order[k]) = mean;
    }
    start = end;
  }
}

double energy_between_image_blocks(const Matrix& images, long m) {
  const Matrix a = images.topRows(m);
  const Matrix b = images.bottomRows(images.rows() - m);
  return energy_statistic(a, b);
}

double entropic_objective(const Matrix& x, const Matrix& y, double epsilon,
                          const ot::SinkhornOptions& opts, bool* converged) {
  const Vector a = Vector::Constant(x.rows(), 1.0 / x.rows());
  const Vector b = Vector::Constant(y.rows(), 1.0 / y.rows());
  ot::SinkhornPotentials pot =
      ot::sinkhorn_potentials(ot::build_cost_matrix(x, y), a, b, epsilon, opts);
  if (converged) *converged = *converged && pot.converged;
  return ot::entropic_cost(pot, a, b);
}

}  // namespace

const char* stat_kind_name(StatKind kind) {
  switch (kind) {
    case StatKind::RankEnergy: return "re";
    case StatKind::SoftRankEnergy: return "sre";
    case StatKind::EnergyDistance: return "ed";
    case StatKind::Mmd: return "mmd";
    case StatKind::Wasserstein1: return "w1";
    case StatKind::SinkhornDivergence: return "sinkdiv";
  }
  return "?";
}

double energy_statistic(const Matrix& a, const Matrix& b) {
  check_two_sample(a, b, "energy_statistic");
  const double m = static_cast<double>(a.rows());
  const double n = static_cast<double>(b.rows());
  const double cross = sum_cross_distances(a, b);
  const double within_a = sum_cross_distances(a, a);
  const double within_b = sum_cross_distances(b, b);
  const double v = 2.0 / (m * n) * cross - within_a / (m * m) - within_b / (n * n);
  const double scale =
      2.0 / (m * n) * cross + within_a / (m * m) + within_b / (n * n) + 1.0;
  return clamp_nonnegative(v, scale);
}

double rank_energy_with_ref(const Matrix& x, const Matrix& y,
                            const ranks::ReferenceSet& ref) {
  check_two_sample(x, y, "rank_energy");
  const Matrix pooled = pool_rows(x, y);
  ranks::RankMapping map = ranks::hard_rank_map(pooled, ref, x.rows());
  average_duplicate_images(pooled, map.images);
  return energy_between_image_blocks(map.images, x.rows());
}

double rank_energy(const Matrix& x, const Matrix& y, std::uint64_t ref_seed,
                   ranks::RefScheme scheme) {
  const ranks::ReferenceSet ref =
      ranks::sample_reference(x.rows() + y.rows(), x.cols(), scheme, ref_seed);
  return rank_energy_with_ref(x, y, ref);
}

double soft_rank_energy_with_ref(const Matrix& x, const Matrix& y, double epsilon,
                                 const ranks::ReferenceSet& ref,
                                 const ot::SinkhornOptions& opts, bool* converged) {
  check_two_sample(x, y, "soft_rank_energy");
  const Matrix pooled = pool_rows(x, y);
  ranks::RankMapping map = ranks::soft_rank_map(pooled, ref, epsilon, x.rows(), opts);
  if (converged) *converged = *converged && map.converged;
  return energy_between_image_blocks(map.images, x.rows());
}

double soft_rank_energy(const Matrix& x, const Matrix& y, double epsilon,
                        std::uint64_t ref_seed, ranks::RefScheme scheme,
                        const ot::SinkhornOptions& opts, bool* converged) {
  const ranks::ReferenceSet ref =
      ranks::sample_reference(x.rows() + y.rows(), x.cols(), scheme, ref_seed);
  return soft_rank_energy_with_ref(x, y, epsilon, ref, opts, converged);
}

double mmd(const Matrix& x, const Matrix& y, double bandwidth) {
  check_two_sample(x, y, "mmd");
  double sigma = bandwidth;
  if (sigma <= 0.0) {
    // median heuristic over the positive pooled pairwise distances;
    // duplicates contribute nothing to the kernel scale
    const Matrix pooled = pool_rows(x, y);
    std::vector<double> dists;
    dists.reserve(pooled.rows() * (pooled.rows() - 1) / 2);
    for (long i = 0; i < pooled.rows(); ++i) {
      for (long j = i + 1; j < pooled.rows(); ++j) {
        const double dij = (pooled.row(i) - pooled.row(j)).norm();
        if (dij > 0.0) dists.push_back(dij);
      }
    }
    if (dists.empty()) {
      sigma = 1.0;  // all points identical; the statistic is 0 for any sigma
    } else {
      auto mid = dists.begin() + dists.size() / 2;
      std::nth_element(dists.begin(), mid, dists.end());
      sigma = *mid;
    }
  }
  const double gamma = 1.0 / (2.0 * sigma * sigma);
  auto kernel_mean = [&](const Matrix& a, const Matrix& b) {
    const Matrix sq = 2.0 * ot::build_cost_matrix(a, b);
    return (-gamma * sq.array()).exp().mean();
  };
  const double v = kernel_mean(x, x) + kernel_mean(y, y) - 2.0 * kernel_mean(x, y);
  return clamp_nonnegative(v, 4.0);
}

double wasserstein1(const Matrix& x, const Matrix& y) {
  check_two_sample(x, y, "wasserstein1");
  const Matrix d = distance_matrix(x, y);
  const Vector a = Vector::Constant(x.rows(), 1.0 / x.rows());
  const Vector b = Vector::Constant(y.rows(), 1.0 / y.rows());
  const ot::Coupling plan = ot::exact_plan(d, a, b);
  return (plan.plan.array() * d.array()).sum();
}

double sinkhorn_divergence(const Matrix& x, const Matrix& y, double epsilon,
                           const ot::SinkhornOptions& opts) {
  check_two_sample(x, y, "sinkhorn_divergence");
  if (!(epsilon > 0.0)) throw ArgumentError("sinkhorn_divergence: epsilon must be > 0");
  bool converged = true;
  const double sxy = entropic_objective(x, y, epsilon, opts, &converged);
  const double sxx = entropic_objective(x, x, epsilon, opts, &converged);
  const double syy = entropic_objective(y, y, epsilon, opts, &converged);
  const double v = sxy - 0.5 * sxx - 0.5 * syy;
  const double scale = std::fabs(sxy) + 0.5 * std::fabs(sxx) + 0.5 * std::fabs(syy) + 1.0;
  // debiasing subtracts solver-tolerance-sized quantities, so the clamp must
  // absorb solver error, not just rounding
  return clamp_nonnegative(v, scale, std::max(1e-10, 100.0 * opts.tol));
}

double evaluate_stat(const StatConfig& cfg, const Matrix& x, const Matrix& y,
                     const ranks::ReferenceSet* shared_ref, bool* converged) {
  if (converged) *converged = true;
  switch (cfg.kind) {
    case StatKind::RankEnergy:
      if (shared_ref) return rank_energy_with_ref(x, y, *shared_ref);
      return rank_energy(x, y, cfg.ref_seed, cfg.ref_scheme);
    case StatKind::SoftRankEnergy:
      if (shared_ref) {
        return soft_rank_energy_with_ref(x, y, cfg.epsilon, *shared_ref, cfg.solver,
                                         converged);
      }
      return soft_rank_energy(x, y, cfg.epsilon, cfg.ref_seed, cfg.ref_scheme,
                              cfg.solver, converged);
    case StatKind::EnergyDistance:
      return energy_statistic(x, y);
    case StatKind::Mmd:
      return mmd(x, y, cfg.bandwidth);
    case StatKind::Wasserstein1:
      return wasserstein1(x, y);
    case StatKind::SinkhornDivergence:
      return sinkhorn_divergence(x, y, cfg.epsilon, cfg.solver);
  }
  throw ArgumentError("evaluate_stat: unknown statistic kind");
}

double null_value_for_permutation(const Matrix& pooled,
                                  const std::vector<long>& perm, long m,
                                  const StatConfig& cfg,
                                  const ranks::ReferenceSet* shared_ref) {
  const long total = pooled.rows();
  if (static_cast<long>(perm.size()) != total) {
    throw ArgumentError("null_value_for_permutation: permutation size mismatch");
  }
  if (m < 1 || m >= total) {
    throw ArgumentError("null_value_for_permutation: split out of range");
  }
  const long n = total - m;
  Matrix a(m, pooled.cols()), b(n, pooled.cols());
  for (long i = 0; i < m; ++i) a.row(i) = pooled.row(perm[i]);
  for (long i = 0; i < n; ++i) b.row(i) = pooled.row(perm[m + i]);
  const double scale = static_cast<double>(m) * static_cast<double>(n) /
                       static_cast<double>(m + n);
  return scale * evaluate_stat(cfg, a, b, shared_ref);
}

NullSample null_calibration(const Matrix& pooled, long m, long n,
                            const StatConfig& cfg, long b, std::uint64_t seed) {
  if (m + n != pooled.rows()) {
    throw ArgumentError("null_calibration: m + n must equal pooled size");
  }
  if (b < 1) throw ArgumentError("null_calibration: need b >= 1");

  // one shared reference per calibration run (same pooled size every split)
  ranks::ReferenceSet ref;
  const ranks::ReferenceSet* shared = nullptr;
  if (cfg.kind == StatKind::RankEnergy || cfg.kind == StatKind::SoftRankEnergy) {
    ref = ranks::sample_reference(pooled.rows(), pooled.cols(), cfg.ref_scheme,
                                  cfg.ref_seed);
    shared = &ref;
  }

  NullSample out;
  out.stat = cfg;
  out.values.resize(b);
  const long total = pooled.rows();
  for (long rep = 0; rep < b; ++rep) {
    Rng rng(derive_stream(seed, static_cast<std::uint64_t>(rep) + 1));
    std::vector<long> perm(total);
    std::iota(perm.begin(), perm.end(), 0L);
    for (long i = total - 1; i > 0; --i) {
      // unbiased bounded draw by rejection
      const std::uint64_t bound = static_cast<std::uint64_t>(i) + 1;
      const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
      std::uint64_t r;
      do {
        r = rng.raw();
      } while (r >= limit);
      std::swap(perm[i], perm[static_cast<long>(r % bound)]);
    }
    out.values[rep] = null_value_for_permutation(pooled, perm, m, cfg, shared);
  }
  return out;
}

}  // namespace otcpd::gof
