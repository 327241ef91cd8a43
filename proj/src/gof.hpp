#pragma once

#include <cstdint>
#include <vector>

#include "rank_maps.hpp"
#include "types.hpp"

namespace otcpd::gof {

enum class StatKind {
  RankEnergy,
  SoftRankEnergy,
  EnergyDistance,
  Mmd,
  Wasserstein1,
  SinkhornDivergence,
};

// Two-sample statistic configuration. Energy-type statistics return the
// squared-statistic (energy form) value.
struct StatConfig {
  StatKind kind = StatKind::SoftRankEnergy;
  double epsilon = 1.0;    // soft rank energy / sinkhorn divergence
  double bandwidth = 0.0;  // mmd; <= 0 selects the median heuristic
  std::uint64_t ref_seed = 0;
  ranks::RefScheme ref_scheme = ranks::RefScheme::IidUniform;
  ot::SinkhornOptions solver;
};

const char* stat_kind_name(StatKind kind);

// 2/(mn) sum ||a_i - b_j|| - 1/m^2 sum ||a_i - a_j|| - 1/n^2 sum ||b_i - b_j||.
double energy_statistic(const Matrix& a, const Matrix& b);

// Energy distance between rank images of the pooled two-sample under a shared
// reference. Exact duplicates in the pooled sample share the barycenter of
// their assigned reference points, so identical samples give exactly zero.
double rank_energy_with_ref(const Matrix& x, const Matrix& y,
                            const ranks::ReferenceSet& ref);
double rank_energy(const Matrix& x, const Matrix& y, std::uint64_t ref_seed,
                   ranks::RefScheme scheme = ranks::RefScheme::IidUniform);

double soft_rank_energy_with_ref(const Matrix& x, const Matrix& y, double epsilon,
                                 const ranks::ReferenceSet& ref,
                                 const ot::SinkhornOptions& opts = {},
                                 bool* converged = nullptr);
double soft_rank_energy(const Matrix& x, const Matrix& y, double epsilon,
                        std::uint64_t ref_seed,
                        ranks::RefScheme scheme = ranks::RefScheme::IidUniform,
                        const ot::SinkhornOptions& opts = {},
                        bool* converged = nullptr);

// Biased V-statistic estimate of squared MMD with a Gaussian kernel.
double mmd(const Matrix& x, const Matrix& y, double bandwidth = 0.0);

// <plan, D> with D_ij = ||x_i - y_j|| (no half, no square).
double wasserstein1(const Matrix& x, const Matrix& y);

// S_eps(X,Y) - S_eps(X,X)/2 - S_eps(Y,Y)/2 where S_eps includes the entropic
// penalty (dual objective value at the fixed point).
double sinkhorn_divergence(const Matrix& x, const Matrix& y, double epsilon,
                           const ot::SinkhornOptions& opts = {});

// Dispatch on config; shared_ref (when given) overrides the per-call
// reference draw for the rank statistics, which is how a detection run keeps
// one reference across all windows.
double evaluate_stat(const StatConfig& cfg, const Matrix& x, const Matrix& y,
                     const ranks::ReferenceSet* shared_ref = nullptr,
                     bool* converged = nullptr);

struct NullSample {
  std::vector<double> values;  // scaled by mn/(m+n)
  StatConfig stat;
};

// Statistic value for one explicit permutation of the pooled rows, scaled by
// mn/(m+n).
double null_value_for_permutation(const Matrix& pooled,
                                  const std::vector<long>& perm, long m,
                                  const StatConfig& cfg,
                                  const ranks::ReferenceSet* shared_ref = nullptr);

// B random (m, n) splits of the pooled rows; each permutation uses its own
// RNG stream derived from (seed, permutation index), so the result does not
// depend on evaluation order.
NullSample null_calibration(const Matrix& pooled, long m, long n,
                            const StatConfig& cfg, long b, std::uint64_t seed);

}  // namespace otcpd::gof
