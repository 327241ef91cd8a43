#pragma once

#include <utility>
#include <vector>

#include "cpd.hpp"
#include "types.hpp"

namespace otcpd::eval {

struct MatchResult {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  std::vector<std::pair<long, long>> pairs;  // (predicted index, true index)
};

// One-to-one matching within margin xi, maximizing the number of matched
// pairs and, among maximizers, minimizing the total |pred - truth|. Solved
// exactly by dynamic programming over the two sorted lists.
MatchResult match_changepoints(const std::vector<long>& pred,
                               const std::vector<long>& truth, long xi);

struct Prf {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
};

// precision = 1 when there are no predictions, recall = 1 when there are no
// true points, f1 = 0 when precision + recall = 0.
Prf precision_recall_f1(const MatchResult& m);

// Sweeps eta over the distinct z values (plus +inf), runs peak search and
// matching at each, and returns the best F1 with the smallest eta attaining it.
std::pair<double, double> best_f1(const cpd::StatSeries& z,
                                  const std::vector<long>& truth, long xi,
                                  long delta);

struct PrCurve {
  std::vector<std::pair<double, double>> points;  // (recall, precision)
  double auc = 0.0;
};

// Precision-recall pairs over the same threshold sweep, anchored at (0, 1),
// duplicate recalls keep their best precision, trapezoidal area with no
// extrapolation past the achieved maximum recall.
PrCurve auc_pr(const cpd::StatSeries& z, const std::vector<long>& truth, long xi,
               long delta);

}  // namespace otcpd::eval
