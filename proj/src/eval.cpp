#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace otcpd::eval {

namespace {

void check_sorted(const std::vector<long>& v, const char* name) {
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) {
      throw ArgumentError(std::string("match_changepoints: ") + name +
                          " must be strictly increasing");
    }
  }
}

struct DpCell {
  long tp = 0;
  long cost = 0;
};

bool better(const DpCell& a, const DpCell& b) {
  if (a.tp != b.tp) return a.tp > b.tp;
  return a.cost < b.cost;
}

// Candidate peaks sorted by descending height (ties toward smaller t); the
// prefix with z >= eta is exactly the candidate set at threshold eta.
struct CandidateList {
  std::vector<long> t;
  std::vector<double> z;
};

CandidateList sorted_candidates(const cpd::StatSeries& zs) {
  const long n = static_cast<long>(zs.z_values.size());
  const auto& zv = zs.z_values;
  std::vector<long> idx;
  for (long i = 0; i < n; ++i) {
    const bool left_ok = (i == 0) || (zv[i] > zv[i - 1]);
    const bool right_ok = (i == n - 1) || (zv[i] >= zv[i + 1]);
    if (left_ok && right_ok) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](long a, long b) {
    if (zv[a] != zv[b]) return zv[a] > zv[b];
    return zs.t_values[a] < zs.t_values[b];
  });
  CandidateList out;
  for (long i : idx) {
    out.t.push_back(zs.t_values[i]);
    out.z.push_back(zv[i]);
  }
  return out;
}

// Greedy selection over the candidate prefix with z >= eta.
std::vector<long> select_peaks(const CandidateList& cands, double eta, long delta) {
  std::set<long> accepted;
  for (size_t k = 0; k < cands.t.size() && cands.z[k] >= eta; ++k) {
    const long t = cands.t[k];
    auto up = accepted.lower_bound(t);
    bool clear = true;
    if (up != accepted.end() && *up - t < delta) clear = false;
    if (clear && up != accepted.begin() && t - *std::prev(up) < delta) clear = false;
    if (clear) accepted.insert(t);
  }
  return {accepted.begin(), accepted.end()};
}

struct SweepPoint {
  double eta;
  MatchResult match;
  Prf prf;
};

std::vector<SweepPoint> threshold_sweep(const cpd::StatSeries& z,
                                        const std::vector<long>& truth, long xi,
                                        long delta) {
  if (delta < 1) throw ArgumentError("threshold sweep: delta must be >= 1");
  const CandidateList cands = sorted_candidates(z);
  std::vector<double> etas(z.z_values);
  std::sort(etas.begin(), etas.end());
  etas.erase(std::unique(etas.begin(), etas.end()), etas.end());
  etas.push_back(std::numeric_limits<double>::infinity());

  std::vector<SweepPoint> out;
  out.reserve(etas.size());
  for (double eta : etas) {
    SweepPoint p;
    p.eta = eta;
    p.match = match_changepoints(select_peaks(cands, eta, delta), truth, xi);
    p.prf = precision_recall_f1(p.match);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

MatchResult match_changepoints(const std::vector<long>& pred,
                               const std::vector<long>& truth, long xi) {
  if (xi < 0) throw ArgumentError("match_changepoints: xi must be >= 0");
  check_sorted(pred, "predictions");
  check_sorted(truth, "true change points");
  const long p = static_cast<long>(pred.size());
  const long t = static_cast<long>(truth.size());

  // dp over suffixes; transitions: match, skip prediction, skip truth
  std::vector<std::vector<DpCell>> dp(p + 1, std::vector<DpCell>(t + 1));
  for (long i = p - 1; i >= 0; --i) {
    for (long j = t - 1; j >= 0; --j) {
      DpCell best = dp[i + 1][j];
      if (better(dp[i][j + 1], best)) best = dp[i][j + 1];
      if (std::labs(pred[i] - truth[j]) <= xi) {
        DpCell m{dp[i + 1][j + 1].tp + 1,
                 dp[i + 1][j + 1].cost + std::labs(pred[i] - truth[j])};
        if (better(m, best)) best = m;
      }
      dp[i][j] = best;
    }
  }

  MatchResult out;
  long i = 0, j = 0;
  while (i < p && j < t) {
    const DpCell& cur = dp[i][j];
    if (std::labs(pred[i] - truth[j]) <= xi) {
      DpCell m{dp[i + 1][j + 1].tp + 1,
               dp[i + 1][j + 1].cost + std::labs(pred[i] - truth[j])};
      if (m.tp == cur.tp && m.cost == cur.cost) {
        out.pairs.emplace_back(pred[i], truth[j]);
        ++i;
        ++j;
        continue;
      }
    }
    if (dp[i + 1][j].tp == cur.tp && dp[i + 1][j].cost == cur.cost) {
      ++i;
    } else {
      ++j;
    }
  }
  out.tp = static_cast<long>(out.pairs.size());
  out.fp = p - out.tp;
  out.fn = t - out.tp;
  return out;
}

Prf precision_recall_f1(const MatchResult& m) {
  Prf out;
  out.precision = (m.tp + m.fp == 0) ? 1.0
                                     : static_cast<double>(m.tp) /
                                           static_cast<double>(m.tp + m.fp);
  out.recall = (m.tp + m.fn == 0)
                   ? 1.0
                   : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  out.f1 = (out.precision + out.recall == 0.0)
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

std::pair<double, double> best_f1(const cpd::StatSeries& z,
                                  const std::vector<long>& truth, long xi,
                                  long delta) {
  double best = -1.0;
  double best_eta = std::numeric_limits<double>::infinity();
  for (const SweepPoint& p : threshold_sweep(z, truth, xi, delta)) {
    if (p.prf.f1 > best) {
      best = p.prf.f1;
      best_eta = p.eta;
    }
  }
  return {best, best_eta};
}

PrCurve auc_pr(const cpd::StatSeries& z, const std::vector<long>& truth, long xi,
               long delta) {
  std::map<double, double> best_precision_at_recall;
  best_precision_at_recall[0.0] = 1.0;  // no-predictions anchor
  for (const SweepPoint& p : threshold_sweep(z, truth, xi, delta)) {
    auto [it, inserted] =
        best_precision_at_recall.try_emplace(p.prf.recall, p.prf.precision);
    if (!inserted) it->second = std::max(it->second, p.prf.precision);
  }
  PrCurve out;
  out.points.assign(best_precision_at_recall.begin(), best_precision_at_recall.end());
  for (size_t k = 1; k < out.points.size(); ++k) {
    const auto& [r0, p0] = out.points[k - 1];
    const auto& [r1, p1] = out.points[k];
    out.auc += (r1 - r0) * 0.5 * (p0 + p1);
  }
  return out;
}

}  // namespace otcpd::eval
