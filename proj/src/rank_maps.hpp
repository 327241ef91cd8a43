#pragma once

#include <cstdint>

#include "ot.hpp"
#include "types.hpp"

namespace otcpd::ranks {

enum class RefScheme {
  IidUniform,  // seeded draws, row-major fill order
  Halton,      // deterministic low-discrepancy points; seed is ignored
};

struct ReferenceSet {
  Matrix points;  // N x d, all coordinates in [0,1]
  RefScheme scheme = RefScheme::IidUniform;
  std::uint64_t seed = 0;
};

ReferenceSet sample_reference(long n, long d, RefScheme scheme, std::uint64_t seed);

// Images of pooled sample points in [0,1]^d. For the hard kind the images are
// a permutation of the reference points; for the soft kind they are
// barycenters of the entropic coupling's conditional rows.
struct RankMapping {
  Matrix images;          // N x d
  bool soft = false;
  double epsilon = 0.0;   // meaningful for the soft kind
  long split_m = 0;       // pooled rows [0, split_m) came from the first sample
  long split_n = 0;
  bool converged = true;  // soft kind: solver convergence propagated, not fatal
  std::vector<long> perm; // hard kind: images.row(i) == ref.points.row(perm[i])
};

// Assignment of pooled points to the reference under the half-squared cost.
RankMapping hard_rank_map(const Matrix& pooled, const ReferenceSet& ref,
                          long split_m = -1);

// Sinkhorn coupling to the reference followed by row-normalized barycentric
// projection. Row normalization makes the images exact conditional means even
// before full marginal convergence.
RankMapping soft_rank_map(const Matrix& pooled, const ReferenceSet& ref,
                          double epsilon, long split_m = -1,
                          const ot::SinkhornOptions& opts = {});

}  // namespace otcpd::ranks
