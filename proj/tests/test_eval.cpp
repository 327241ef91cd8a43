#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "eval.hpp"
#include "rng.hpp"

using namespace otcpd;
using namespace otcpd::eval;

namespace {

cpd::StatSeries make_series(const std::vector<double>& z) {
  cpd::StatSeries s;
  s.z_values = z;
  for (long i = 0; i < static_cast<long>(z.size()); ++i) s.t_values.push_back(i);
  return s;
}

// Exhaustive one-to-one matching: maximize tp, then minimize total distance.
std::pair<long, long> brute_force_match(const std::vector<long>& pred,
                                        const std::vector<long>& truth, long xi) {
  long best_tp = 0;
  long best_cost = 0;
  std::vector<char> used(truth.size(), 0);
  std::function<void(size_t, long, long)> rec = [&](size_t i, long tp, long cost) {
    if (i == pred.size()) {
      if (tp > best_tp || (tp == best_tp && cost < best_cost)) {
        best_tp = tp;
        best_cost = cost;
      }
      return;
    }
    rec(i + 1, tp, cost);  // leave pred[i] unmatched
    for (size_t j = 0; j < truth.size(); ++j) {
      if (!used[j] && std::labs(pred[i] - truth[j]) <= xi) {
        used[j] = 1;
        rec(i + 1, tp + 1, cost + std::labs(pred[i] - truth[j]));
        used[j] = 0;
      }
    }
  };
  rec(0, 0, 0);
  return {best_tp, best_cost};
}

std::vector<long> random_sorted(Rng& rng, long max_len, long range) {
  const long len = static_cast<long>(rng.uniform01() * (max_len + 1));
  std::vector<long> v;
  long cur = 0;
  for (long i = 0; i < len; ++i) {
    cur += 1 + static_cast<long>(rng.uniform01() * range);
    v.push_back(cur);
  }
  return v;
}

}  // namespace

TEST_SUITE("matching") {
  TEST_CASE("hand-checked examples") {
    MatchResult a = match_changepoints({5}, {5}, 0);
    CHECK(a.tp == 1);
    CHECK(a.fp == 0);
    CHECK(a.fn == 0);

    MatchResult b = match_changepoints({10, 11}, {12}, 2);
    CHECK(b.tp == 1);
    CHECK(b.fp == 1);
    CHECK(b.fn == 0);
    // among max matchings the closer prediction is chosen
    REQUIRE(b.pairs.size() == 1);
    CHECK(b.pairs[0].first == 11);

    MatchResult c = match_changepoints({}, {7}, 3);
    CHECK(c.tp == 0);
    CHECK(c.fp == 0);
    CHECK(c.fn == 1);
  }

  TEST_CASE("unsorted input is rejected") {
    CHECK_THROWS_AS(match_changepoints({5, 3}, {1}, 1), ArgumentError);
    CHECK_THROWS_AS(match_changepoints({1}, {4, 4}, 1), ArgumentError);
  }

  TEST_CASE("matches the exhaustive optimum") {
    Rng rng(81);
    for (int rep = 0; rep < 500; ++rep) {
      std::vector<long> pred = random_sorted(rng, 6, 6);
      std::vector<long> truth = random_sorted(rng, 6, 6);
      const long xi = static_cast<long>(rng.uniform01() * 5.0);
      MatchResult got = match_changepoints(pred, truth, xi);
      auto [tp, cost] = brute_force_match(pred, truth, xi);
      CHECK(got.tp == tp);
      long got_cost = 0;
      for (auto& [pi, tj] : got.pairs) got_cost += std::labs(pi - tj);
      CHECK(got_cost == cost);
      // structural invariants
      CHECK(got.tp + got.fp == static_cast<long>(pred.size()));
      CHECK(got.tp + got.fn == static_cast<long>(truth.size()));
      std::vector<long> seen_p, seen_t;
      for (auto& [pi, tj] : got.pairs) {
        CHECK(std::labs(pi - tj) <= xi);
        seen_p.push_back(pi);
        seen_t.push_back(tj);
      }
      std::sort(seen_p.begin(), seen_p.end());
      std::sort(seen_t.begin(), seen_t.end());
      CHECK(std::adjacent_find(seen_p.begin(), seen_p.end()) == seen_p.end());
      CHECK(std::adjacent_find(seen_t.begin(), seen_t.end()) == seen_t.end());
    }
  }
}

TEST_SUITE("precision recall f1") {
  TEST_CASE("formulas and conventions") {
    Prf a = precision_recall_f1({1, 1, 0, {}});
    CHECK(a.precision == doctest::Approx(0.5));
    CHECK(a.recall == doctest::Approx(1.0));
    CHECK(a.f1 == doctest::Approx(2.0 / 3.0));

    Prf b = precision_recall_f1({0, 0, 0, {}});
    CHECK(b.precision == 1.0);
    CHECK(b.recall == 1.0);
    CHECK(b.f1 == 1.0);

    Prf c = precision_recall_f1({0, 3, 2, {}});
    CHECK(c.precision == 0.0);
    CHECK(c.recall == 0.0);
    CHECK(c.f1 == 0.0);
  }
}

TEST_SUITE("threshold sweep metrics") {
  TEST_CASE("single clean peak at the true point") {
    auto [f1, eta] = best_f1(make_series({0, 0, 3, 0, 0}), {2}, 0, 1);
    CHECK(f1 == doctest::Approx(1.0));
    CHECK(eta <= 3.0);
  }

  TEST_CASE("constant zero series, nonempty truth") {
    auto [f1, eta] = best_f1(make_series({0, 0, 0, 0}), {2}, 1, 1);
    CHECK(f1 == 0.0);
    PrCurve pr = auc_pr(make_series({0, 0, 0, 0}), {2}, 1, 1);
    CHECK(pr.auc == 0.0);
    REQUIRE(pr.points.size() == 1);
    CHECK(pr.points[0].first == 0.0);
    CHECK(pr.points[0].second == 1.0);
  }

  TEST_CASE("perfect detector reaches auc 1") {
    PrCurve pr = auc_pr(make_series({0, 5, 0, 0, 5, 0}), {1, 4}, 0, 1);
    CHECK(pr.auc == doctest::Approx(1.0));
  }

  TEST_CASE("best f1 dominates individual thresholds") {
    Rng rng(82);
    for (int rep = 0; rep < 50; ++rep) {
      const long n = 8 + static_cast<long>(rng.uniform01() * 10);
      std::vector<double> z(n);
      for (double& v : z) v = rng.uniform01();
      std::vector<long> truth = random_sorted(rng, 4, 5);
      if (truth.empty()) truth = {3};
      auto series = make_series(z);
      auto [best, beta] = best_f1(series, truth, 2, 2);
      for (double eta : {0.1, 0.35, 0.8}) {
        cpd::ChangePointSet cps = cpd::peak_search(series, eta, 2);
        Prf p = precision_recall_f1(match_changepoints(cps.indices, truth, 2));
        CHECK(best >= p.f1 - 1e-12);
      }
      (void)beta;
    }
  }

  TEST_CASE("smallest eta attaining the best f1 is returned") {
    // two thresholds achieve f1 = 1; the sweep must return the smaller
    auto series = make_series({0, 4, 0, 0, 2, 0});
    auto [f1, eta] = best_f1(series, {1}, 0, 1);
    CHECK(f1 == doctest::Approx(1.0));
    CHECK(eta == doctest::Approx(4.0));  // at eta <= 2 the spurious peak enters
  }

  TEST_CASE("best eta is reproducible through the public peak search") {
    Rng rng(85);
    for (int rep = 0; rep < 100; ++rep) {
      const long n = 6 + static_cast<long>(rng.uniform01() * 14);
      std::vector<double> z(n);
      const bool ties = rep % 3 == 0;
      for (double& v : z) {
        v = ties ? std::floor(rng.uniform01() * 5.0) / 4.0 : rng.uniform01();
      }
      std::vector<long> truth = random_sorted(rng, 4, 5);
      if (truth.empty()) truth = {3};
      const long xi = 1 + rep % 3, delta = 1 + rep % 4;
      auto series = make_series(z);
      auto [bf1, beta] = best_f1(series, truth, xi, delta);
      cpd::ChangePointSet cps = cpd::peak_search(series, beta, delta);
      Prf p = precision_recall_f1(match_changepoints(cps.indices, truth, xi));
      CHECK(p.f1 == doctest::Approx(bf1).epsilon(1e-14));
    }
  }

  TEST_CASE("fixture against a fine-grid sweep oracle") {
    Rng rng(83);
    for (int rep = 0; rep < 20; ++rep) {
      const long n = 10 + static_cast<long>(rng.uniform01() * 8);
      std::vector<double> z(n);
      for (double& v : z) v = std::floor(rng.uniform01() * 8.0) / 2.0;
      std::vector<long> truth = random_sorted(rng, 4, 4);
      if (truth.empty()) truth = {2};
      auto series = make_series(z);
      const long xi = 1, delta = 2;
      auto [best, beta] = best_f1(series, truth, xi, delta);
      // oracle: dense eta grid plus the exact values
      double oracle_best = -1.0;
      std::vector<double> etas(z.begin(), z.end());
      for (int k = 0; k <= 200; ++k) etas.push_back(k * 0.025);
      etas.push_back(std::numeric_limits<double>::infinity());
      for (double eta : etas) {
        cpd::ChangePointSet cps = cpd::peak_search(series, eta, delta);
        Prf p = precision_recall_f1(match_changepoints(cps.indices, truth, xi));
        oracle_best = std::max(oracle_best, p.f1);
      }
      CHECK(best == doctest::Approx(oracle_best).epsilon(1e-12));
      (void)beta;
    }
  }

  TEST_CASE("auc against a fine-grid oracle and monotone-transform invariance") {
    Rng rng(84);
    for (int rep = 0; rep < 20; ++rep) {
      const long n = 10 + static_cast<long>(rng.uniform01() * 8);
      std::vector<double> z(n);
      for (double& v : z) v = rng.uniform01();
      std::vector<long> truth = random_sorted(rng, 4, 4);
      if (truth.empty()) truth = {2};
      auto series = make_series(z);
      PrCurve pr = auc_pr(series, truth, 1, 2);
      CHECK(pr.auc >= 0.0);
      CHECK(pr.auc <= 1.0);
      for (auto& [r, p] : pr.points) {
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
      }
      // strictly monotone transform of z preserves the curve exactly
      std::vector<double> zt(z.size());
      for (size_t k = 0; k < z.size(); ++k) zt[k] = std::exp(2.0 * z[k]) - 0.5;
      PrCurve pr2 = auc_pr(make_series(zt), truth, 1, 2);
      CHECK(pr.auc == doctest::Approx(pr2.auc).epsilon(1e-12));
    }
  }
}
