#include "ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace otcpd::ot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_probability(const Vector& w, const char* name, bool strictly_positive) {
  if (w.size() == 0) throw ArgumentError(std::string(name) + ": empty weight vector");
  double sum = 0.0;
  for (long i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || w[i] < 0.0 || (strictly_positive && w[i] == 0.0)) {
      throw ArgumentError(std::string(name) + ": weights must be " +
                          (strictly_positive ? "> 0" : ">= 0") + " and finite");
    }
    sum += w[i];
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw ArgumentError(std::string(name) + ": weights must sum to 1");
  }
}

double median_entry(const Matrix& c) {
  std::vector<double> v(c.data(), c.data() + c.size());
  auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

Matrix build_cost_matrix(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols()) {
    throw ArgumentError("build_cost_matrix: dimension mismatch (" +
                        std::to_string(x.cols()) + " vs " + std::to_string(y.cols()) + ")");
  }
  if (x.rows() == 0 || y.rows() == 0 || x.cols() == 0) {
    throw ArgumentError("build_cost_matrix: empty input");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw ArgumentError("build_cost_matrix: non-finite coordinates");
  }
  const Vector xs = x.rowwise().squaredNorm();
  const Vector ys = y.rowwise().squaredNorm();
  Matrix c = -x * y.transpose();
  c.colwise() += 0.5 * xs;
  c.rowwise() += 0.5 * ys.transpose();
  // Gram cancellation can leave tiny negatives on near-duplicate points.
  return c.cwiseMax(0.0);
}

SinkhornPotentials sinkhorn_potentials(const Matrix& cost, const Vector& a,
                                       const Vector& b, double epsilon,
                                       const SinkhornOptions& opts) {
  const long m = cost.rows();
  const long n = cost.cols();
  if (a.size() != m || b.size() != n) {
    throw ArgumentError("sinkhorn: weight sizes do not match the cost matrix");
  }
  check_probability(a, "sinkhorn: a", true);
  check_probability(b, "sinkhorn: b", true);
  if (!(epsilon > 0.0)) throw ArgumentError("sinkhorn: epsilon must be > 0");
  if (!(opts.tol > 0.0)) throw ArgumentError("sinkhorn: tol must be > 0");

  double eps_scale = 1.0;
  Matrix neg_c = -cost;
  if (opts.median_normalize) {
    const double med = median_entry(cost);
    if (med > 0.0) {
      eps_scale = med;
      neg_c /= med;
    }
  }

  const Vector la = a.array().log().matrix();
  const Vector lb = b.array().log().matrix();

  Vector f = Vector::Zero(m);
  Vector g = Vector::Zero(n);
  Vector gt = epsilon * lb;  // g + eps*log(b), the row-update shift
  Vector ft(m);
  Vector row_max(m), f_new(m), g_new(n);
  Eigen::RowVectorXd col_max(n);
  Matrix w(m, n);

  long iterations = 0;
  double err = kInf;

  // Over-relaxed updates share the plain fixed point; the step factor grows
  // while the marginal violation keeps shrinking and resets to 1 otherwise.
  double theta = 1.0;
  double prev_err = kInf;

  auto run_level = [&](double eps, double level_tol, long budget) {
    for (long k = 0; k < budget && iterations < opts.max_iter; ++k) {
      // f half-step: row log-sum-exp of (g_j + eps*log b_j - C_ij)/eps
      w = (neg_c.rowwise() + gt.transpose()) / eps;
      row_max = w.rowwise().maxCoeff();
      f_new = -eps * ((w.colwise() - row_max).array().exp().rowwise().sum().log() +
                      row_max.array())
                        .matrix();
      err = (a.array() * (((f - f_new) / eps).array().exp() - 1.0)).abs().sum();
      if (err < prev_err) {
        theta = std::min(opts.overrelax_max, theta * 1.03);
      } else {
        theta = 1.0;
      }
      prev_err = err;
      f += theta * (f_new - f);
      ft = f + eps * la;
      // g half-step: column log-sum-exp of (f_i + eps*log a_i - C_ij)/eps
      w = (neg_c.colwise() + ft) / eps;
      col_max = w.colwise().maxCoeff();
      g_new = -eps * ((w.rowwise() - col_max).array().exp().colwise().sum().log() +
                      col_max.array())
                        .matrix()
                        .transpose();
      g += theta * (g_new - g);
      gt = g + eps * lb;
      ++iterations;
      if (err <= level_tol) return true;
    }
    return false;
  };

  if (opts.epsilon_scaling) {
    double level = 0.5 * (-neg_c.minCoeff());  // half the largest cost entry
    while (level > 4.0 * epsilon && iterations < opts.max_iter) {
      run_level(level, std::max(opts.tol, 1e-3), 200);
      level *= 0.25;
    }
  }
  const bool converged = run_level(epsilon, opts.tol, opts.max_iter);

  // Fix the additive gauge: sum_j b_j g_j = 0.
  const double shift = b.dot(g);
  g.array() -= shift;
  f.array() += shift;

  SinkhornPotentials out;
  out.epsilon = epsilon * eps_scale;
  if (eps_scale != 1.0) {
    f *= eps_scale;
    g *= eps_scale;
  }
  out.f = std::move(f);
  out.g = std::move(g);
  out.iterations = iterations;
  out.marginal_error = err;
  out.converged = converged;
  return out;
}

Coupling sinkhorn(const Matrix& cost, const Vector& a, const Vector& b,
                  double epsilon, const SinkhornOptions& opts) {
  SinkhornPotentials pot = sinkhorn_potentials(cost, a, b, epsilon, opts);
  Coupling out;
  out.epsilon = pot.epsilon;
  out.iterations = pot.iterations;
  out.marginal_error = pot.marginal_error;
  out.converged = pot.converged;
  out.plan = ((-cost).colwise() + pot.f).rowwise() + pot.g.transpose();
  out.plan = (out.plan / pot.epsilon).array().exp().matrix();
  out.plan.array().colwise() *= a.array();
  out.plan.array().rowwise() *= b.transpose().array();
  out.f = std::move(pot.f);
  out.g = std::move(pot.g);
  return out;
}

double entropic_cost(const SinkhornPotentials& pot, const Vector& a, const Vector& b) {
  return a.dot(pot.f) + b.dot(pot.g);
}

namespace {

// O(n^3) shortest-augmenting-path assignment with dual potentials.
// Potentials remain feasible (u_i + v_j <= c_ij) throughout, which the
// tie-refinement below relies on.
struct HungarianResult {
  std::vector<long> match;  // match[i] = column of row i
  std::vector<double> u, v;
};

HungarianResult hungarian(const Matrix& c) {
  const long n = c.rows();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<long> p(n + 1, 0), way(n + 1, 0);
  for (long i = 1; i <= n; ++i) {
    p[0] = i;
    long j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const long i0 = p[j0];
      double delta = kInf;
      long j1 = 0;
      for (long j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (long j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const long j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  HungarianResult res;
  res.match.assign(n, -1);
  for (long j = 1; j <= n; ++j) {
    if (p[j] > 0) res.match[p[j] - 1] = j - 1;
  }
  res.u = std::move(u);
  res.v = std::move(v);
  return res;
}

// Kuhn augmenting step on the tight-edge graph.
bool try_augment(long row, const std::vector<std::vector<long>>& adj,
                 std::vector<char>& visited, std::vector<long>& col_owner) {
  for (long j : adj[row]) {
    if (visited[j]) continue;
    visited[j] = 1;
    if (col_owner[j] < 0 || try_augment(col_owner[j], adj, visited, col_owner)) {
      col_owner[j] = row;
      return true;
    }
  }
  return false;
}

bool has_perfect_matching(const std::vector<std::vector<long>>& adj, long n_cols,
                          const std::vector<long>& rows) {
  std::vector<long> col_owner(n_cols, -1);
  for (long r : rows) {
    std::vector<char> visited(n_cols, 0);
    if (!try_augment(r, adj, visited, col_owner)) return false;
  }
  return true;
}

}  // namespace

Assignment exact_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) {
    throw ArgumentError("exact_assignment: cost matrix must be square");
  }
  const long n = cost.rows();
  Assignment out;
  if (n == 0) return out;
  if (!cost.allFinite()) throw ArgumentError("exact_assignment: non-finite costs");

  HungarianResult h = hungarian(cost);

  // Complementary slackness: every optimal assignment uses only edges that are
  // tight for the feasible duals (u, v). Picking the lexicographically
  // smallest perfect matching inside the tight-edge graph therefore picks the
  // lexicographically smallest optimal permutation.
  const double tie_tol = 1e-9 * (cost.cwiseAbs().maxCoeff() + 1.0);
  std::vector<std::vector<long>> adj(n);
  bool unique = true;
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (cost(i, j) - h.u[i + 1] - h.v[j + 1] <= tie_tol) adj[i].push_back(j);
    }
    if (adj[i].size() != 1) unique = false;
  }

  if (unique) {
    out.perm.assign(n, -1);
    for (long i = 0; i < n; ++i) out.perm[i] = adj[i][0];
  } else {
    out.perm.assign(n, -1);
    std::vector<char> col_used(n, 0);
    for (long i = 0; i < n; ++i) {
      std::vector<long> rest;
      for (long r = i + 1; r < n; ++r) rest.push_back(r);
      bool fixed = false;
      for (long j : adj[i]) {
        if (col_used[j]) continue;
        // Feasibility of completing the matching with column j taken.
        std::vector<std::vector<long>> sub(n);
        for (long r = i + 1; r < n; ++r) {
          for (long jj : adj[r]) {
            if (!col_used[jj] && jj != j) sub[r].push_back(jj);
          }
        }
        if (has_perfect_matching(sub, n, rest)) {
          out.perm[i] = j;
          col_used[j] = 1;
          fixed = true;
          break;
        }
      }
      if (!fixed) throw NumericError("exact_assignment: tie refinement failed");
    }
  }

  out.cost = 0.0;
  for (long i = 0; i < n; ++i) out.cost += cost(i, out.perm[i]);
  return out;
}

Coupling exact_plan(const Matrix& cost, const Vector& a, const Vector& b) {
  const long m = cost.rows();
  const long n = cost.cols();
  if (a.size() != m || b.size() != n) {
    throw ArgumentError("exact_plan: weight sizes do not match the cost matrix");
  }
  check_probability(a, "exact_plan: a", false);
  check_probability(b, "exact_plan: b", false);
  if (!cost.allFinite()) throw ArgumentError("exact_plan: non-finite costs");

  Matrix plan = Matrix::Zero(m, n);
  Vector rem_a = a, rem_b = b;
  std::vector<double> pi(m + n, 0.0);
  std::vector<double> dist(m + n);
  std::vector<long> parent(m + n);
  std::vector<char> done(m + n);

  const long max_aug = 4 * (m + 1) * (n + 1) + 64;
  long augmentations = 0;

  // rounding leaves residues of order 1e-16 per node; anything below the
  // mass tolerance is reported through marginal_error instead of routed
  const double mass_tol = 1e-12;
  for (;;) {
    const double remaining = rem_b.sum();
    if (remaining <= mass_tol) break;
    if (++augmentations > max_aug) {
      throw NumericError("exact_plan: augmentation budget exceeded");
    }
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1L);
    std::fill(done.begin(), done.end(), 0);
    for (long i = 0; i < m; ++i) {
      if (rem_a[i] > 0.0) dist[i] = 0.0;
    }
    // Dense Dijkstra on reduced costs.
    for (long step = 0; step < m + n; ++step) {
      long u = -1;
      double best = kInf;
      for (long v = 0; v < m + n; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u < 0) break;
      done[u] = 1;
      if (u < m) {
        for (long j = 0; j < n; ++j) {
          const double rc = std::max(0.0, cost(u, j) + pi[u] - pi[m + j]);
          if (dist[u] + rc < dist[m + j]) {
            dist[m + j] = dist[u] + rc;
            parent[m + j] = u;
          }
        }
      } else {
        const long j = u - m;
        for (long i = 0; i < m; ++i) {
          if (plan(i, j) <= 0.0) continue;
          const double rc = std::max(0.0, -cost(i, j) + pi[m + j] - pi[i]);
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            parent[i] = m + j;
          }
        }
      }
    }
    long t = -1;
    double best = kInf;
    for (long j = 0; j < n; ++j) {
      if (rem_b[j] > 0.0 && dist[m + j] < best) {
        best = dist[m + j];
        t = m + j;
      }
    }
    if (t < 0) {
      // all supplies consumed; a sub-tolerance demand residue may survive
      if (remaining <= 1e-9) break;
      throw NumericError("exact_plan: infeasible (no augmenting path)");
    }

    for (long v = 0; v < m + n; ++v) pi[v] += std::min(dist[v], dist[t]);

    // Bottleneck along the path.
    double delta = rem_b[t - m];
    for (long v = t; parent[v] >= 0; v = parent[v]) {
      const long p = parent[v];
      if (p >= m) delta = std::min(delta, plan(v, p - m));  // backward arc
    }
    long root = t;
    while (parent[root] >= 0) root = parent[root];
    delta = std::min(delta, rem_a[root]);

    for (long v = t; parent[v] >= 0; v = parent[v]) {
      const long p = parent[v];
      if (p < m) {
        plan(p, v - m) += delta;
      } else {
        plan(v, p - m) -= delta;
      }
    }
    rem_a[root] -= delta;
    rem_b[t - m] -= delta;
  }

  Coupling out;
  out.epsilon = 0.0;
  out.iterations = augmentations;
  out.marginal_error = (plan.rowwise().sum() - a).cwiseAbs().sum() +
                       (plan.colwise().sum().transpose() - b).cwiseAbs().sum();
  out.converged = true;
  out.f.resize(m);
  out.g.resize(n);
  for (long i = 0; i < m; ++i) out.f[i] = -pi[i];
  for (long j = 0; j < n; ++j) out.g[j] = pi[m + j];
  const double shift = b.dot(out.g);
  out.g.array() -= shift;
  out.f.array() += shift;
  out.plan = std::move(plan);
  return out;
}

Matrix barycentric_map(const Coupling& coupling, const Matrix& y) {
  if (coupling.plan.cols() != y.rows()) {
    throw ArgumentError("barycentric_map: plan columns and target rows differ");
  }
  const Vector row_sums = coupling.plan.rowwise().sum();
  if ((row_sums.array() <= 0.0).any()) {
    throw ArgumentError("barycentric_map: zero row sum in coupling");
  }
  Matrix img = coupling.plan * y;
  img.array().colwise() /= row_sums.array();
  return img;
}

}  // namespace otcpd::ot
