#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cpd.hpp"
#include "data_io.hpp"
#include "rng.hpp"

using namespace otcpd;
using namespace otcpd::cpd;

namespace {

StatSeries make_series(const std::vector<double>& z) {
  StatSeries s;
  s.z_values = z;
  for (long i = 0; i < static_cast<long>(z.size()); ++i) s.t_values.push_back(i);
  s.window = 1;
  return s;
}

// Independent greedy reimplementation used as the oracle.
std::vector<long> greedy_oracle(const std::vector<double>& z, double eta, long delta) {
  const long n = static_cast<long>(z.size());
  std::vector<long> cands;
  for (long i = 0; i < n; ++i) {
    const bool l = (i == 0) || (z[i] > z[i - 1]);
    const bool r = (i == n - 1) || (z[i] >= z[i + 1]);
    if (l && r && z[i] >= eta) cands.push_back(i);
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [&](long a, long b) { return z[a] > z[b]; });
  std::vector<long> acc;
  for (long c : cands) {
    bool ok = true;
    for (long a : acc) {
      if (std::labs(c - a) < delta) ok = false;
    }
    if (ok) acc.push_back(c);
  }
  std::sort(acc.begin(), acc.end());
  return acc;
}

}  // namespace

TEST_SUITE("sliding statistic") {
  TEST_CASE("constant series gives identically zero z") {
    Matrix series = Matrix::Ones(40, 2) * 3.25;
    for (gof::StatKind kind :
         {gof::StatKind::RankEnergy, gof::StatKind::SoftRankEnergy,
          gof::StatKind::EnergyDistance, gof::StatKind::Mmd,
          gof::StatKind::Wasserstein1, gof::StatKind::SinkhornDivergence}) {
      gof::StatConfig cfg;
      cfg.kind = kind;
      cfg.epsilon = 0.5;
      cfg.ref_seed = 3;
      StatSeries z = sliding_statistic(series, 5, cfg);
      CHECK(z.t_values.size() == 40 - 10 + 1);
      for (double v : z.z_values) CHECK(v <= 1e-7);
    }
  }

  TEST_CASE("boundary count at T equal to 2n") {
    Matrix series = Matrix::Random(20, 3);
    gof::StatConfig cfg;
    cfg.kind = gof::StatKind::EnergyDistance;
    StatSeries z = sliding_statistic(series, 10, cfg);
    REQUIRE(z.t_values.size() == 1);
    CHECK(z.t_values[0] == 10);
  }

  TEST_CASE("too-short series is rejected with an explanation") {
    Matrix series = Matrix::Random(19, 2);
    gof::StatConfig cfg;
    cfg.kind = gof::StatKind::EnergyDistance;
    CHECK_THROWS_WITH_AS(sliding_statistic(series, 10, cfg),
                         doctest::Contains("shorter than two windows"), ArgumentError);
  }

  TEST_CASE("stride thins the grid deterministically") {
    Matrix series = Matrix::Random(60, 2);
    gof::StatConfig cfg;
    cfg.kind = gof::StatKind::EnergyDistance;
    StatSeries full = sliding_statistic(series, 10, cfg, 1);
    StatSeries thin = sliding_statistic(series, 10, cfg, 5);
    REQUIRE(thin.t_values.size() * 5 >= full.t_values.size());
    for (size_t i = 0; i < thin.t_values.size(); ++i) {
      CHECK(thin.t_values[i] == full.t_values[5 * i]);
      CHECK(thin.z_values[i] == full.z_values[5 * i]);
    }
  }

  TEST_CASE("worker count does not change the result") {
    Rng rng(71);
    Matrix series(50, 2);
    for (long i = 0; i < 50; ++i)
      for (long j = 0; j < 2; ++j)
        series(i, j) = rng.normal() + (i >= 25 ? 3.0 : 0.0);
    gof::StatConfig cfg;
    cfg.kind = gof::StatKind::SoftRankEnergy;
    cfg.epsilon = 1.0;
    cfg.ref_seed = 5;
    StatSeries a = sliding_statistic(series, 8, cfg, 1, 1);
    StatSeries b = sliding_statistic(series, 8, cfg, 1, 4);
    CHECK(a.z_values == b.z_values);
  }

  TEST_CASE("identical-law boundary is statistically invisible") {
    // two segments drawn from the same distribution: the nominal boundary
    // should not be distinguishable from anywhere else in the z sequence
    int boundary_hits = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      io::SegmentSpec spec;
      spec.d = 2;
      io::Segment seg;
      seg.dist = io::SegDist::Gaussian;
      seg.cov_scale = 0.001;
      seg.length = 60;
      spec.segments.push_back(seg);
      spec.segments.push_back(seg);
      const io::TimeSeries ts = io::generate_synthetic(spec, derive_stream(31, seed));
      gof::StatConfig cfg;
      cfg.kind = gof::StatKind::SoftRankEnergy;
      cfg.epsilon = 0.1;
      cfg.ref_seed = seed;
      cfg.solver.tol = 1e-6;
      const StatSeries z = sliding_statistic(ts.values, 15, cfg);
      const long arg =
          z.t_values[std::max_element(z.z_values.begin(), z.z_values.end()) -
                     z.z_values.begin()];
      if (std::labs(arg - 60) <= 10) ++boundary_hits;
    }
    CHECK(boundary_hits <= 2);  // chance-level, not systematic
  }

  TEST_CASE("step series localizes within two samples") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      Rng rng(derive_stream(900, seed));
      Matrix series(200, 2);
      for (long i = 0; i < 200; ++i) {
        for (long j = 0; j < 2; ++j) {
          series(i, j) = (i < 100 ? 0.0 : 5.0) + 0.1 * rng.normal();
        }
      }
      gof::StatConfig cfg;
      cfg.kind = gof::StatKind::SoftRankEnergy;
      cfg.epsilon = 0.1;
      cfg.ref_seed = seed;
      StatSeries z = sliding_statistic(series, 25, cfg);
      const long arg =
          z.t_values[std::max_element(z.z_values.begin(), z.z_values.end()) -
                     z.z_values.begin()];
      if (std::labs(arg - 100) <= 2) ++hits;
    }
    CHECK(hits == 3);
  }
}

TEST_SUITE("peak search") {
  TEST_CASE("hand-checked examples") {
    ChangePointSet a = peak_search(make_series({0, 1, 0}), 0.5, 1);
    CHECK(a.indices == std::vector<long>{1});

    ChangePointSet b = peak_search(make_series({0, 3, 0, 2, 0}), 1.0, 2);
    CHECK(b.indices == std::vector<long>{1, 3});

    ChangePointSet c = peak_search(make_series({0, 3, 2.9, 0}), 1.0, 2);
    CHECK(c.indices == std::vector<long>{1});
  }

  TEST_CASE("plateau yields its first index") {
    ChangePointSet a = peak_search(make_series({0, 2, 2, 2, 0}), 1.0, 1);
    CHECK(a.indices == std::vector<long>{1});
  }

  TEST_CASE("endpoints are one-sided maxima") {
    ChangePointSet a = peak_search(make_series({5, 1, 0, 1, 4}), 0.5, 1);
    CHECK(a.indices == std::vector<long>{0, 4});
    ChangePointSet b = peak_search(make_series({5, 1, 0, 2, 1}), 0.5, 1);
    CHECK(b.indices == std::vector<long>{0, 3});
  }

  TEST_CASE("empty result below threshold") {
    ChangePointSet a = peak_search(make_series({0.1, 0.4, 0.2}), 1.0, 1);
    CHECK(a.indices.empty());
  }

  TEST_CASE("accepted peaks satisfy the contract") {
    Rng rng(72);
    for (int rep = 0; rep < 200; ++rep) {
      const long n = 3 + static_cast<long>(rng.uniform01() * 10);
      std::vector<double> z(n);
      for (double& v : z) v = std::floor(rng.uniform01() * 6.0);  // many ties
      const double eta = rng.uniform01() * 4.0;
      const long delta = 1 + static_cast<long>(rng.uniform01() * 4.0);
      ChangePointSet got = peak_search(make_series(z), eta, delta);
      for (size_t k = 0; k < got.indices.size(); ++k) {
        const long t = got.indices[k];
        CHECK(z[t] >= eta);
        if (t > 0) CHECK(z[t] > z[t - 1]);
        if (t + 1 < n) CHECK(z[t] >= z[t + 1]);
        if (k > 0) CHECK(got.indices[k] - got.indices[k - 1] >= delta);
      }
    }
  }

  TEST_CASE("agrees with the independent greedy oracle") {
    Rng rng(73);
    for (int rep = 0; rep < 500; ++rep) {
      const long n = 2 + static_cast<long>(rng.uniform01() * 11);
      std::vector<double> z(n);
      const bool ties = rep % 2 == 0;
      for (double& v : z) {
        v = ties ? std::floor(rng.uniform01() * 4.0) : rng.uniform01();
      }
      const double eta = rng.uniform01();
      const long delta = 1 + static_cast<long>(rng.uniform01() * 5.0);
      CHECK(peak_search(make_series(z), eta, delta).indices ==
            greedy_oracle(z, eta, delta));
    }
  }

  TEST_CASE("maximal among admissible candidate subsets") {
    // nothing below delta spacing can be added to the greedy output
    Rng rng(74);
    for (int rep = 0; rep < 200; ++rep) {
      const long n = 4 + static_cast<long>(rng.uniform01() * 8);
      std::vector<double> z(n);
      for (double& v : z) v = rng.uniform01();
      const double eta = 0.2;
      const long delta = 2;
      std::vector<long> got = peak_search(make_series(z), eta, delta).indices;
      std::vector<long> cands;
      for (long i = 0; i < n; ++i) {
        const bool l = (i == 0) || (z[i] > z[i - 1]);
        const bool r = (i == n - 1) || (z[i] >= z[i + 1]);
        if (l && r && z[i] >= eta) cands.push_back(i);
      }
      for (long c : cands) {
        bool could_add = true;
        for (long a : got) {
          if (std::labs(c - a) < delta) could_add = false;
        }
        CHECK_FALSE(could_add);
      }
    }
  }

  TEST_CASE("raising eta never adds change points") {
    Rng rng(75);
    for (int rep = 0; rep < 100; ++rep) {
      const long n = 5 + static_cast<long>(rng.uniform01() * 8);
      std::vector<double> z(n);
      for (double& v : z) v = rng.uniform01();
      const long delta = 1 + static_cast<long>(rng.uniform01() * 3.0);
      const double lo = 0.2, hi = 0.6;
      std::vector<long> at_lo = peak_search(make_series(z), lo, delta).indices;
      std::vector<long> at_hi = peak_search(make_series(z), hi, delta).indices;
      CHECK(at_hi.size() <= at_lo.size());
      // the high-threshold set consists of greedy-accepted candidates at the
      // low threshold filtered by height, re-resolved for spacing
      std::vector<long> refiltered;
      for (long tval : at_lo) {
        if (z[tval] >= hi) refiltered.push_back(tval);
      }
      for (long tval : at_hi) {
        const bool tall_enough = z[tval] >= hi;
        CHECK(tall_enough);
      }
      (void)refiltered;
    }
  }

  TEST_CASE("detect composes the two stages") {
    Rng rng(76);
    Matrix series(80, 1);
    for (long i = 0; i < 80; ++i) series(i, 0) = (i < 40 ? 0.0 : 4.0) + 0.05 * rng.normal();
    DetectConfig cfg;
    cfg.window = 10;
    cfg.stat.kind = gof::StatKind::EnergyDistance;
    cfg.eta = 1.0;
    cfg.delta = 10;
    auto [z, cps] = detect(series, cfg);
    REQUIRE(cps.indices.size() == 1);
    CHECK(std::labs(cps.indices[0] - 40) <= 2);

    Matrix flat = Matrix::Ones(80, 1);
    auto [z2, cps2] = detect(flat, cfg);
    CHECK(cps2.indices.empty());
  }
}
