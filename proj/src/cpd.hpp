#pragma once

#include <utility>
#include <vector>

#include "gof.hpp"
#include "types.hpp"

namespace otcpd::cpd {

// z_t aligned with its time indices; t ranges over [window, T - window] on
// the stride grid, where z_t compares rows [t-window, t) against [t, t+window).
struct StatSeries {
  std::vector<long> t_values;
  std::vector<double> z_values;
  gof::StatConfig stat;
  long window = 0;
  long stride = 1;
  long warnings = 0;  // windows whose solver did not reach tolerance
};

struct ChangePointSet {
  std::vector<long> indices;  // strictly increasing time indices
  double eta = 0.0;
  long delta = 1;
};

// One reference set per run for the rank statistics (drawn from stat.ref_seed
// with 2*window points), shared across every window.
StatSeries sliding_statistic(const Matrix& series, long window,
                             const gof::StatConfig& stat, long stride = 1,
                             int workers = 1);

// Candidates are left-strict/right-nonstrict local maxima (a plateau yields
// its first index, series endpoints are one-sided); candidates below eta are
// dropped, then greedy selection in descending height (ties toward smaller t)
// discards anything within delta of an accepted peak.
ChangePointSet peak_search(const StatSeries& z, double eta, long delta);

struct DetectConfig {
  long window = 50;
  gof::StatConfig stat;
  double eta = 0.0;
  long delta = 1;
  long stride = 1;
  int workers = 1;
};

std::pair<StatSeries, ChangePointSet> detect(const Matrix& series,
                                             const DetectConfig& cfg);

}  // namespace otcpd::cpd
