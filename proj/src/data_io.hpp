#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpd.hpp"
#include "types.hpp"

namespace otcpd::io {

struct TimeSeries {
  Matrix values;            // T x d
  std::vector<long> truth;  // strictly increasing change indices in (0, T)
  std::string name;
};

enum class SegDist { Gaussian, Laplace, Gamma };

struct Segment {
  SegDist dist = SegDist::Gaussian;
  long length = 0;
  // gaussian: mean (scalar broadcast across coordinates) and either an
  // isotropic covariance scale or a full d x d covariance matrix
  double mean = 0.0;
  double cov_scale = 1.0;
  Matrix cov;  // used when non-empty
  // laplace
  double loc = 0.0;
  double scale = 1.0;
  // gamma, i.i.d. per coordinate
  double shape = 1.0;
  double rate = 1.0;
};

struct SegmentSpec {
  long d = 1;
  std::vector<Segment> segments;
};

// The 10-segment synthetic benchmark schedule in dimension d: alternating
// gaussian scales, a laplace block, a gamma block and one correlated
// gaussian block (unit diagonal, 0.5 off-diagonal), 3300 samples, 9 changes.
SegmentSpec synthetic_benchmark_spec(long d = 10);

// i.i.d. draws per segment from one sequential seeded stream; truth indices
// are the cumulative segment lengths except the last.
TimeSeries generate_synthetic(const SegmentSpec& spec, std::uint64_t seed);

// Rectangular numeric CSV, comma separated, one row per time step. Errors
// carry path and line number.
TimeSeries load_csv(const std::string& path, bool has_header,
                    const std::optional<std::string>& label_path = std::nullopt);

// Header row plus %.17g values for exact round-trips. Rejects non-finite
// values. Writes the label file (one 0-based index per line) when given.
void save_csv(const TimeSeries& series, const std::string& path,
              const std::optional<std::string>& label_path = std::nullopt);

std::vector<long> load_labels(const std::string& path, long total_rows);

// Self-contained static SVG: z polyline, dashed threshold line, dots on
// predicted change points, dashed vertical lines on true ones.
void plot_svg(const cpd::StatSeries& z, const cpd::ChangePointSet& cps,
              const std::vector<long>& truth, double eta, const std::string& path);

// Overlaid Gaussian kernel density estimates, one polyline per named series.
void plot_kde_svg(const std::vector<std::pair<std::string, std::vector<double>>>& sets,
                  const std::string& path);

// z-series as a two-column CSV (t, z).
void save_stat_series_csv(const cpd::StatSeries& z, const std::string& path);
cpd::StatSeries load_stat_series_csv(const std::string& path);

void save_indices(const std::vector<long>& indices, const std::string& path);

}  // namespace otcpd::io
