#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace otcpd::ot {

// Cost convention used throughout: C[i][j] = 1/2 * ||x_i - y_j||^2. The 1/2
// factor is part of the cost, not of epsilon; dropping it halves the
// effective regularization.
Matrix build_cost_matrix(const Matrix& x, const Matrix& y);

struct SinkhornOptions {
  double tol = 1e-9;        // L1 marginal violation target
  long max_iter = 10000;    // total iteration budget across scaling levels
  bool epsilon_scaling = true;
  double overrelax_max = 1.8;     // safeguarded; 1.0 disables
  bool median_normalize = false;  // rescale C by its median entry before solving
};

// Entropic coupling together with its dual potentials. The plan satisfies
// plan(i,j) = a_i * b_j * exp((f_i + g_j - C_ij) / epsilon) by construction
// when epsilon > 0, and the potentials are normalized so that sum_j b_j g_j = 0.
struct Coupling {
  Matrix plan;
  Vector f;
  Vector g;
  double epsilon = 0.0;
  long iterations = 0;
  double marginal_error = 0.0;
  bool converged = true;
};

// Potentials-only result; enough to reconstruct the plan or evaluate the
// barycentric map without materializing an m*n matrix.
struct SinkhornPotentials {
  Vector f;
  Vector g;
  double epsilon = 0.0;
  long iterations = 0;
  double marginal_error = 0.0;
  bool converged = true;
};

// Log-domain Sinkhorn for the entropically regularized problem
//   min_{plan in Pi(a,b)} <plan, C> + epsilon * KL(plan || a x b).
// Never throws on slow convergence: the result is returned with
// converged = false and the achieved marginal error.
SinkhornPotentials sinkhorn_potentials(const Matrix& cost, const Vector& a,
                                       const Vector& b, double epsilon,
                                       const SinkhornOptions& opts = {});

Coupling sinkhorn(const Matrix& cost, const Vector& a, const Vector& b,
                  double epsilon, const SinkhornOptions& opts = {});

// Dual objective value <a,f> + <b,g>; at the fixed point this equals the
// primal transport cost plus the entropic penalty.
double entropic_cost(const SinkhornPotentials& pot, const Vector& a, const Vector& b);

struct Assignment {
  std::vector<long> perm;  // row i is matched to column perm[i]
  double cost = 0.0;
};

// Exact linear assignment on a square cost matrix. Among all minimizers the
// lexicographically smallest permutation is returned, so results are
// reproducible even on degenerate inputs.
Assignment exact_assignment(const Matrix& cost);

// Exact unregularized transport plan (epsilon = 0 in the returned Coupling),
// solved as a min-cost flow by successive shortest paths at desk scale.
Coupling exact_plan(const Matrix& cost, const Vector& a, const Vector& b);

// Row-conditional barycenters: out.row(i) = sum_j plan(i,j) y.row(j) / rowsum_i.
Matrix barycentric_map(const Coupling& coupling, const Matrix& y);

}  // namespace otcpd::ot
