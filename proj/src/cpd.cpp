#include "cpd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "parallel.hpp"

namespace otcpd::cpd {

StatSeries sliding_statistic(const Matrix& series, long window,
                             const gof::StatConfig& stat, long stride,
                             int workers) {
  const long total = series.rows();
  if (window < 2) throw ArgumentError("sliding_statistic: window must be >= 2");
  if (stride < 1) throw ArgumentError("sliding_statistic: stride must be >= 1");
  if (total < 2 * window) {
    throw ArgumentError("sliding_statistic: series length " + std::to_string(total) +
                        " is shorter than two windows (" + std::to_string(2 * window) +
                        "); reduce --window or provide more data");
  }

  StatSeries out;
  out.stat = stat;
  out.window = window;
  out.stride = stride;
  for (long t = window; t <= total - window; t += stride) out.t_values.push_back(t);
  out.z_values.assign(out.t_values.size(), 0.0);

  ranks::ReferenceSet ref;
  const ranks::ReferenceSet* shared = nullptr;
  if (stat.kind == gof::StatKind::RankEnergy ||
      stat.kind == gof::StatKind::SoftRankEnergy) {
    ref = ranks::sample_reference(2 * window, series.cols(), stat.ref_scheme,
                                  stat.ref_seed);
    shared = &ref;
  }

  std::atomic<long> warnings{0};
  parallel_for(static_cast<long>(out.t_values.size()), workers, [&](long i) {
    const long t = out.t_values[i];
    const Matrix left = series.middleRows(t - window, window);
    const Matrix right = series.middleRows(t, window);
    bool converged = true;
    out.z_values[i] = gof::evaluate_stat(stat, left, right, shared, &converged);
    if (!converged) warnings.fetch_add(1);
  });
  out.warnings = warnings.load();
  return out;
}

ChangePointSet peak_search(const StatSeries& z, double eta, long delta) {
  if (delta < 1) throw ArgumentError("peak_search: delta must be >= 1");
  const long n = static_cast<long>(z.z_values.size());
  const auto& zv = z.z_values;

  std::vector<long> candidates;
  for (long i = 0; i < n; ++i) {
    const bool left_ok = (i == 0) || (zv[i] > zv[i - 1]);
    const bool right_ok = (i == n - 1) || (zv[i] >= zv[i + 1]);
    if (left_ok && right_ok && zv[i] >= eta) candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end(), [&](long a, long b) {
    if (zv[a] != zv[b]) return zv[a] > zv[b];
    return z.t_values[a] < z.t_values[b];
  });

  std::vector<long> accepted;  // time indices
  for (long i : candidates) {
    const long t = z.t_values[i];
    bool clear = true;
    for (long s : accepted) {
      if (std::labs(t - s) < delta) {
        clear = false;
        break;
      }
    }
    if (clear) accepted.push_back(t);
  }
  std::sort(accepted.begin(), accepted.end());

  ChangePointSet out;
  out.indices = std::move(accepted);
  out.eta = eta;
  out.delta = delta;
  return out;
}

std::pair<StatSeries, ChangePointSet> detect(const Matrix& series,
                                             const DetectConfig& cfg) {
  StatSeries z = sliding_statistic(series, cfg.window, cfg.stat, cfg.stride,
                                   cfg.workers);
  ChangePointSet cps = peak_search(z, cfg.eta, cfg.delta);
  return {std::move(z), std::move(cps)};
}

}  // namespace otcpd::cpd
