#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gof.hpp"
#include "rng.hpp"

using namespace otcpd;
using namespace otcpd::gof;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const long m = static_cast<long>(rows.size());
  const long d = static_cast<long>(rows.begin()->size());
  Matrix out(m, d);
  long i = 0;
  for (const auto& r : rows) {
    long j = 0;
    for (double v : r) out(i, j++) = v;
    ++i;
  }
  return out;
}

Matrix gaussian_cloud(Rng& rng, long n, long d, double mean, double sd) {
  Matrix x(n, d);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < d; ++j) x(i, j) = mean + sd * rng.normal();
  return x;
}

// Exact empirical W1 on the line via the quantile coupling; handles unequal
// sample counts by merging the quantile breakpoints.
double w1_1d_oracle(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const long m = static_cast<long>(x.size());
  const long n = static_cast<long>(y.size());
  double total = 0.0;
  long i = 0, j = 0;
  double q = 0.0;
  while (i < m && j < n) {
    const double qi = static_cast<double>(i + 1) / m;
    const double qj = static_cast<double>(j + 1) / n;
    const double qn = std::min(qi, qj);
    total += (qn - q) * std::fabs(x[i] - y[j]);
    q = qn;
    if (qi <= qn + 1e-15) ++i;
    if (qj <= qn + 1e-15) ++j;
  }
  return total;
}

const Matrix kFixtureX = mat({{0.12, 0.31},
                              {0.47, 0.66},
                              {0.92, 0.14},
                              {0.55, 0.42},
                              {0.21, 0.85},
                              {0.73, 0.59}});
const Matrix kFixtureY = mat({{1.02, 1.11},
                              {1.35, 0.96},
                              {0.88, 1.42},
                              {1.17, 1.27},
                              {0.64, 1.03},
                              {1.29, 1.38}});

ranks::ReferenceSet fixture_ref() {
  return ranks::sample_reference(12, 2, ranks::RefScheme::Halton, 0);
}

}  // namespace

TEST_SUITE("energy statistic") {
  TEST_CASE("identical lists give exactly zero") {
    Rng rng(51);
    Matrix a = gaussian_cloud(rng, 7, 3, 0.0, 1.0);
    CHECK(energy_statistic(a, a) == 0.0);
  }

  TEST_CASE("hand-computed values") {
    CHECK(energy_statistic(mat({{0.0}}), mat({{1.0}})) == doctest::Approx(2.0));
    CHECK(energy_statistic(mat({{0.0}, {1.0}}), mat({{0.0}, {1.0}})) ==
          doctest::Approx(0.0));
  }

  TEST_CASE("symmetry and nonnegativity") {
    Rng rng(52);
    for (int rep = 0; rep < 20; ++rep) {
      Matrix a = gaussian_cloud(rng, 4 + rep % 5, 2, 0.0, 1.0);
      Matrix b = gaussian_cloud(rng, 3 + rep % 4, 2, 0.5, 2.0);
      const double ab = energy_statistic(a, b);
      CHECK(ab >= 0.0);
      CHECK(ab == doctest::Approx(energy_statistic(b, a)).epsilon(1e-12));
    }
  }

  TEST_CASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(energy_statistic(mat({{0.0}}), mat({{0.0, 1.0}})), ArgumentError);
  }
}

TEST_SUITE("rank energy") {
  TEST_CASE("zero on identical sample lists") {
    Rng rng(53);
    Matrix x = gaussian_cloud(rng, 9, 2, 1.0, 0.5);
    CHECK(rank_energy(x, x, 17) == 0.0);
  }

  TEST_CASE("frozen fixture value") {
    // independent fixed-point/assignment oracle gives 0.46298117238658315
    const double v = rank_energy_with_ref(kFixtureX, kFixtureY, fixture_ref());
    CHECK(v == doctest::Approx(0.46298117238658315).epsilon(1e-10));
  }

  TEST_CASE("exact invariance under positive scaling and translation") {
    Rng rng(54);
    for (int rep = 0; rep < 30; ++rep) {
      const long d = 1 + rep % 3;
      Matrix x = gaussian_cloud(rng, 6, d, 0.0, 1.0);
      Matrix y = gaussian_cloud(rng, 8, d, 1.0, 1.5);
      const double base = rank_energy(x, y, 1000 + rep);
      const double c = 0.1 + 5.0 * rng.uniform01();
      Eigen::RowVectorXd t(d);
      for (long k = 0; k < d; ++k) t[k] = 4.0 * rng.uniform01() - 2.0;
      Matrix xs = (c * x).rowwise() + t;
      Matrix ys = (c * y).rowwise() + t;
      CHECK(rank_energy(xs, ys, 1000 + rep) == base);
    }
  }

  TEST_CASE("bounded by 2 sqrt(d)") {
    Rng rng(55);
    for (int rep = 0; rep < 10; ++rep) {
      const long d = 1 + rep % 4;
      Matrix x = gaussian_cloud(rng, 10, d, 0.0, 3.0);
      Matrix y = gaussian_cloud(rng, 10, d, 50.0, 0.1);
      CHECK(rank_energy(x, y, rep) <= 2.0 * std::sqrt(static_cast<double>(d)));
    }
  }

  TEST_CASE("separated samples exceed the permutation null") {
    Rng rng(56);
    Matrix x = gaussian_cloud(rng, 20, 2, 0.0, 1.0);
    Matrix y = gaussian_cloud(rng, 20, 2, 3.0, 1.0);
    StatConfig cfg;
    cfg.kind = StatKind::RankEnergy;
    cfg.ref_seed = 99;
    const double observed =
        rank_energy(x, y, cfg.ref_seed) * (20.0 * 20.0 / 40.0);
    Matrix pooled(40, 2);
    pooled.topRows(20) = x;
    pooled.bottomRows(20) = y;
    NullSample null = null_calibration(pooled, 20, 20, cfg, 200, 7);
    std::vector<double> v = null.values;
    std::sort(v.begin(), v.end());
    CHECK(observed > v[197]);  // beyond the empirical 99th percentile
  }
}

TEST_SUITE("soft rank energy") {
  TEST_CASE("zero on identical sample lists") {
    Rng rng(57);
    Matrix x = gaussian_cloud(rng, 8, 3, 0.0, 2.0);
    CHECK(soft_rank_energy(x, x, 0.5, 3) <= 1e-8);
  }

  TEST_CASE("value collapses for enormous epsilon") {
    Rng rng(58);
    Matrix x = gaussian_cloud(rng, 10, 2, 0.0, 1.0);
    Matrix y = gaussian_cloud(rng, 10, 2, 5.0, 1.0);
    CHECK(soft_rank_energy(x, y, 1e7, 4) <= 1e-5);
  }

  TEST_CASE("frozen fixture values decrease in epsilon") {
    const ranks::ReferenceSet ref = fixture_ref();
    const ot::SinkhornOptions tight{.tol = 1e-12, .max_iter = 200000};
    const double v01 =
        soft_rank_energy_with_ref(kFixtureX, kFixtureY, 0.1, ref, tight);
    const double v1 =
        soft_rank_energy_with_ref(kFixtureX, kFixtureY, 1.0, ref, tight);
    const double v10 =
        soft_rank_energy_with_ref(kFixtureX, kFixtureY, 10.0, ref, tight);
    CHECK(v01 == doctest::Approx(0.3963936338948022).epsilon(1e-8));
    CHECK(v1 == doctest::Approx(0.073747155112130633).epsilon(1e-8));
    CHECK(v10 == doctest::Approx(0.0074423692412106911).epsilon(1e-8));
    CHECK(v01 > v1);
    CHECK(v1 > v10);
  }

  TEST_CASE("bounded by 2 sqrt(d) and nonnegative") {
    Rng rng(59);
    for (int rep = 0; rep < 10; ++rep) {
      const long d = 1 + rep % 4;
      Matrix x = gaussian_cloud(rng, 12, d, 0.0, 1.0);
      Matrix y = gaussian_cloud(rng, 12, d, 10.0, 5.0);
      const double v = soft_rank_energy(x, y, 0.5, rep);
      CHECK(v >= 0.0);
      CHECK(v <= 2.0 * std::sqrt(static_cast<double>(d)));
    }
  }

  TEST_CASE("w1 upper bound at sample level") {
    // squared soft rank energy vs (2d/eps) * W1 on equal-size inputs
    Rng rng(60);
    for (int rep = 0; rep < 12; ++rep) {
      const long d = 1 + rep % 4;
      const long n = 5 + rep;
      Matrix x = gaussian_cloud(rng, n, d, 0.0, 1.0);
      Matrix y = gaussian_cloud(rng, n, d, 0.5, 1.2);
      const double eps = (rep % 3 == 0) ? 0.1 : ((rep % 3 == 1) ? 1.0 : 10.0);
      const double sre = soft_rank_energy(x, y, eps, 100 + rep);
      const double w1 = wasserstein1(x, y);
      CHECK(sre <= (2.0 * d / eps) * w1 + 1e-6);
    }
  }

  TEST_CASE("convergence flag propagates") {
    Rng rng(61);
    Matrix x = gaussian_cloud(rng, 10, 2, 0.0, 1.0);
    Matrix y = gaussian_cloud(rng, 10, 2, 8.0, 1.0);
    bool converged = true;
    const double v = soft_rank_energy(x, y, 0.001, 5, ranks::RefScheme::IidUniform,
                                      {.tol = 1e-12, .max_iter = 5}, &converged);
    CHECK_FALSE(converged);
    CHECK(std::isfinite(v));
  }
}

TEST_SUITE("mmd") {
  TEST_CASE("zero on identical inputs") {
    Rng rng(62);
    Matrix x = gaussian_cloud(rng, 9, 4, 0.0, 1.0);
    CHECK(mmd(x, x) == 0.0);
    // degenerate case: every point equal, median heuristic must stay finite
    Matrix flat = Matrix::Ones(6, 3);
    CHECK(mmd(flat, flat) == 0.0);
    Matrix mostly = gaussian_cloud(rng, 6, 2, 0.0, 1.0);
    mostly.topRows(5).setZero();
    CHECK(std::isfinite(mmd(mostly, mostly)));
  }

  TEST_CASE("singleton closed form") {
    for (double h : {0.5, 1.0, 3.0}) {
      for (double sigma : {0.7, 2.0}) {
        const double expected = 2.0 * (1.0 - std::exp(-h * h / (2.0 * sigma * sigma)));
        CHECK(mmd(mat({{0.0}}), mat({{h}}), sigma) == doctest::Approx(expected));
      }
    }
  }

  TEST_CASE("matches the naive double-sum oracle") {
    Rng rng(63);
    Matrix x = gaussian_cloud(rng, 10, 3, 0.0, 1.0);
    Matrix y = gaussian_cloud(rng, 10, 3, 1.0, 2.0);
    const double sigma = 1.3;
    auto k = [&](const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& v) {
      return std::exp(-(u - v).squaredNorm() / (2.0 * sigma * sigma));
    };
    double xx = 0, yy = 0, xy = 0;
    for (long i = 0; i < 10; ++i) {
      for (long j = 0; j < 10; ++j) {
        xx += k(x.row(i), x.row(j));
        yy += k(y.row(i), y.row(j));
        xy += k(x.row(i), y.row(j));
      }
    }
    const double oracle = xx / 100 + yy / 100 - 2 * xy / 100;
    CHECK(mmd(x, y, sigma) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_SUITE("wasserstein1") {
  TEST_CASE("basics") {
    Rng rng(64);
    Matrix x = gaussian_cloud(rng, 6, 2, 0.0, 1.0);
    CHECK(wasserstein1(x, x) == doctest::Approx(0.0));
    CHECK(wasserstein1(mat({{0.0}}), mat({{1.0}})) == doctest::Approx(1.0));
  }

  TEST_CASE("matches the 1-d quantile coupling oracle") {
    Rng rng(65);
    for (int rep = 0; rep < 20; ++rep) {
      const long m = 2 + static_cast<long>(rng.uniform01() * 10);
      const long n = 2 + static_cast<long>(rng.uniform01() * 10);
      std::vector<double> xs(m), ys(n);
      Matrix x(m, 1), y(n, 1);
      for (long i = 0; i < m; ++i) x(i, 0) = xs[i] = 3.0 * rng.normal();
      for (long j = 0; j < n; ++j) y(j, 0) = ys[j] = 1.0 + 2.0 * rng.normal();
      CHECK(wasserstein1(x, y) == doctest::Approx(w1_1d_oracle(xs, ys)).epsilon(1e-9));
    }
  }
}

TEST_SUITE("sinkhorn divergence") {
  TEST_CASE("zero on identical inputs, symmetric") {
    Rng rng(66);
    Matrix x = gaussian_cloud(rng, 8, 2, 0.0, 1.0);
    Matrix y = gaussian_cloud(rng, 9, 2, 1.0, 1.0);
    CHECK(sinkhorn_divergence(x, x, 0.5) <= 1e-7);
    const double xy = sinkhorn_divergence(x, y, 0.5);
    const double yx = sinkhorn_divergence(y, x, 0.5);
    CHECK(xy == doctest::Approx(yx).epsilon(1e-7));
    CHECK(xy >= 0.0);
  }

  TEST_CASE("frozen fixture value") {
    Matrix x = mat({{0.0}, {0.3}, {1.1}});
    Matrix y = mat({{0.2}, {0.5}, {0.9}, {1.4}});
    const double v =
        sinkhorn_divergence(x, y, 0.5, {.tol = 1e-13, .max_iter = 100000});
    CHECK(v == doctest::Approx(0.040452431627577223).epsilon(1e-7));
  }
}

TEST_SUITE("null calibration") {
  TEST_CASE("identity permutation reproduces the scaled statistic") {
    Rng rng(67);
    Matrix pooled = gaussian_cloud(rng, 12, 2, 0.0, 1.0);
    StatConfig cfg;
    cfg.kind = StatKind::EnergyDistance;
    std::vector<long> identity(12);
    std::iota(identity.begin(), identity.end(), 0L);
    const double direct =
        energy_statistic(pooled.topRows(5), pooled.bottomRows(7)) * (5.0 * 7.0 / 12.0);
    CHECK(null_value_for_permutation(pooled, identity, 5, cfg) ==
          doctest::Approx(direct));
  }

  TEST_CASE("values nonnegative and deterministic") {
    Rng rng(68);
    Matrix pooled = gaussian_cloud(rng, 16, 2, 0.0, 1.0);
    StatConfig cfg;
    cfg.kind = StatKind::SoftRankEnergy;
    cfg.epsilon = 1.0;
    cfg.ref_seed = 5;
    NullSample a = null_calibration(pooled, 8, 8, cfg, 12, 42);
    NullSample b = null_calibration(pooled, 8, 8, cfg, 12, 42);
    CHECK(a.values == b.values);
    for (double v : a.values) CHECK(v >= 0.0);
    NullSample c = null_calibration(pooled, 8, 8, cfg, 12, 43);
    CHECK(a.values != c.values);
  }

  TEST_CASE("approximate distribution-freeness across base laws") {
    // same null quantiles (within sampling noise) whether the pooled data is
    // gaussian or laplace
    Rng rng(69);
    const long half = 40;
    Matrix gauss(2 * half, 3), lap(2 * half, 3);
    for (long i = 0; i < 2 * half; ++i) {
      for (long j = 0; j < 3; ++j) {
        gauss(i, j) = rng.normal();
        lap(i, j) = rng.laplace(0.0, 1.0);
      }
    }
    StatConfig cfg;
    cfg.kind = StatKind::SoftRankEnergy;
    cfg.epsilon = 0.1;
    cfg.ref_seed = 11;
    NullSample a = null_calibration(gauss, half, half, cfg, 120, 1);
    NullSample b = null_calibration(lap, half, half, cfg, 120, 2);
    auto quantile = [](std::vector<double> v, double q) {
      std::sort(v.begin(), v.end());
      return v[static_cast<long>(q * (v.size() - 1))];
    };
    const double scale = quantile(a.values, 0.9) + quantile(b.values, 0.9);
    CHECK(std::fabs(quantile(a.values, 0.5) - quantile(b.values, 0.5)) <=
          0.25 * scale);
    CHECK(std::fabs(quantile(a.values, 0.9) - quantile(b.values, 0.9)) <=
          0.25 * scale);
  }
}
