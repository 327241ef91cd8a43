#include "data_io.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rng.hpp"

namespace otcpd::io {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double_strict(const std::string& cell, const std::string& path,
                           long line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0')) {
    throw DataError(path + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                    cell + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

SegmentSpec synthetic_benchmark_spec(long d) {
  SegmentSpec spec;
  spec.d = d;
  auto gauss = [](double mean, double cov_scale, long length) {
    Segment s;
    s.dist = SegDist::Gaussian;
    s.mean = mean;
    s.cov_scale = cov_scale;
    s.length = length;
    return s;
  };
  spec.segments.push_back(gauss(0.0, 0.001, 300));
  spec.segments.push_back(gauss(0.0, 0.01, 400));
  spec.segments.push_back(gauss(1.0, 1.0, 500));
  {
    Segment s;
    s.dist = SegDist::Laplace;
    s.loc = 0.0;
    s.scale = 1.0;
    s.length = 300;
    spec.segments.push_back(s);
  }
  spec.segments.push_back(gauss(1.0, 1.0, 400));
  {
    Segment s;
    s.dist = SegDist::Gamma;
    s.shape = 2.0;
    s.rate = 2.0;
    s.length = 300;
    spec.segments.push_back(s);
  }
  spec.segments.push_back(gauss(0.0, 0.1, 200));
  {
    // correlated block: unit diagonal, 0.5 everywhere else
    Segment s;
    s.dist = SegDist::Gaussian;
    s.mean = 1.0;
    s.cov = Matrix::Constant(d, d, 0.5);
    s.cov.diagonal().setOnes();
    s.length = 300;
    spec.segments.push_back(s);
  }
  spec.segments.push_back(gauss(0.0, 0.01, 200));
  spec.segments.push_back(gauss(0.0, 0.001, 400));
  return spec;
}

TimeSeries generate_synthetic(const SegmentSpec& spec, std::uint64_t seed) {
  if (spec.d < 1) throw ArgumentError("generate_synthetic: d must be >= 1");
  if (spec.segments.empty()) {
    throw ArgumentError("generate_synthetic: need at least one segment");
  }
  long total = 0;
  for (const Segment& s : spec.segments) {
    if (s.length < 1) throw ArgumentError("generate_synthetic: segment length < 1");
    total += s.length;
  }

  TimeSeries out;
  out.values.resize(total, spec.d);
  Rng rng(derive_stream(seed, 0));
  long row = 0;
  for (const Segment& s : spec.segments) {
    Eigen::LLT<Matrix> chol;
    if (s.dist == SegDist::Gaussian && s.cov.size() > 0) {
      if (s.cov.rows() != spec.d || s.cov.cols() != spec.d) {
        throw ArgumentError("generate_synthetic: covariance must be d x d");
      }
      chol.compute(s.cov);
      if (chol.info() != Eigen::Success) {
        throw DataError("generate_synthetic: covariance is not positive definite");
      }
    }
    for (long k = 0; k < s.length; ++k, ++row) {
      switch (s.dist) {
        case SegDist::Gaussian: {
          Vector z(spec.d);
          for (long j = 0; j < spec.d; ++j) z[j] = rng.normal();
          if (s.cov.size() > 0) {
            out.values.row(row) =
                (chol.matrixL() * z).transpose().array() + s.mean;
          } else {
            out.values.row(row) =
                (std::sqrt(s.cov_scale) * z).transpose().array() + s.mean;
          }
          break;
        }
        case SegDist::Laplace:
          for (long j = 0; j < spec.d; ++j) {
            out.values(row, j) = rng.laplace(s.loc, s.scale);
          }
          break;
        case SegDist::Gamma:
          for (long j = 0; j < spec.d; ++j) {
            out.values(row, j) = rng.gamma(s.shape, s.rate);
          }
          break;
      }
    }
    if (row < total) out.truth.push_back(row);
  }
  out.name = "synthetic";
  return out;
}

TimeSeries load_csv(const std::string& path, bool has_header,
                    const std::optional<std::string>& label_path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  TimeSeries out;
  out.name = path;
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  long d = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && has_header) continue;
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    const std::vector<std::string> cells = split_csv_line(line);
    if (d < 0) {
      d = static_cast<long>(cells.size());
    } else if (static_cast<long>(cells.size()) != d) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(d) + " columns, got " +
                      std::to_string(cells.size()));
    }
    std::vector<double> row(d);
    for (long j = 0; j < d; ++j) {
      row[j] = parse_double_strict(cells[j], path, line_no);
    }
    rows.push_back(std::move(row));
  }
  const long t = static_cast<long>(rows.size());
  out.values.resize(t, std::max<long>(d, 0));
  for (long i = 0; i < t; ++i) {
    for (long j = 0; j < d; ++j) out.values(i, j) = rows[i][j];
  }
  if (label_path) out.truth = load_labels(*label_path, t);
  return out;
}

void save_csv(const TimeSeries& series, const std::string& path,
              const std::optional<std::string>& label_path) {
  if (series.values.size() > 0 && !series.values.allFinite()) {
    throw DataError("save_csv: series contains non-finite values");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const long d = series.values.cols();
  for (long j = 0; j < d; ++j) out << (j ? ",x" : "x") << j;
  out << "\n";
  for (long i = 0; i < series.values.rows(); ++i) {
    for (long j = 0; j < d; ++j) {
      if (j) out << ',';
      out << fmt_double(series.values(i, j));
    }
    out << "\n";
  }
  if (!out) throw IoError("short write to " + path);
  if (label_path) {
    std::ofstream lab(*label_path);
    if (!lab) throw IoError("cannot write " + *label_path);
    for (long v : series.truth) lab << v << "\n";
  }
}

std::vector<long> load_labels(const std::string& path, long total_rows) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<long> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const char* begin = line.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    while (end && (*end == ' ' || *end == '\r')) ++end;
    if (end == begin || (end && *end != '\0')) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad label '" + line +
                      "'");
    }
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] <= 0 || out[i] >= total_rows) {
      throw DataError(path + ": label " + std::to_string(out[i]) +
                      " outside (0, " + std::to_string(total_rows) + ")");
    }
    if (i > 0 && out[i] == out[i - 1]) {
      throw DataError(path + ": duplicate label " + std::to_string(out[i]));
    }
  }
  return out;
}

namespace {

constexpr double kW = 960.0, kH = 320.0;
constexpr double kLeft = 56.0, kRight = 12.0, kTop = 12.0, kBottom = 32.0;

struct Scale {
  double t0, t1, zmax;
  double x(double t) const {
    return kLeft + (t - t0) / std::max(1.0, t1 - t0) * (kW - kLeft - kRight);
  }
  double y(double z) const {
    return kH - kBottom - z / zmax * (kH - kTop - kBottom);
  }
};

}  // namespace

void plot_svg(const cpd::StatSeries& z, const cpd::ChangePointSet& cps,
              const std::vector<long>& truth, double eta, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  double zmax = eta;
  for (double v : z.z_values) zmax = std::max(zmax, v);
  if (!(zmax > 0.0)) zmax = 1.0;
  zmax *= 1.05;
  Scale s{z.t_values.empty() ? 0.0 : static_cast<double>(z.t_values.front()),
          z.t_values.empty() ? 1.0 : static_cast<double>(z.t_values.back()), zmax};

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
      << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\""
      << kW - kRight << "\" y2=\"" << kH - kBottom
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"4\" y=\"" << kTop + 10 << "\" font-size=\"11\">"
      << fmt_double(zmax) << "</text>\n";
  // truth: dashed vertical lines
  for (long tau : truth) {
    out << "<line class=\"truth\" x1=\"" << s.x(static_cast<double>(tau))
        << "\" y1=\"" << kTop << "\" x2=\"" << s.x(static_cast<double>(tau))
        << "\" y2=\"" << kH - kBottom
        << "\" stroke=\"purple\" stroke-dasharray=\"4,4\"/>\n";
  }
  // statistic polyline
  if (!z.t_values.empty()) {
    out << "<polyline class=\"stat\" fill=\"none\" stroke=\"steelblue\" "
           "stroke-width=\"1\" points=\"";
    for (size_t i = 0; i < z.t_values.size(); ++i) {
      if (i) out << ' ';
      out << s.x(static_cast<double>(z.t_values[i])) << ',' << s.y(z.z_values[i]);
    }
    out << "\"/>\n";
  }
  // threshold
  out << "<line class=\"eta\" x1=\"" << kLeft << "\" y1=\"" << s.y(eta) << "\" x2=\""
      << kW - kRight << "\" y2=\"" << s.y(eta)
      << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  // predictions: red dots at their statistic height
  for (long tau : cps.indices) {
    double zv = 0.0;
    const auto it = std::lower_bound(z.t_values.begin(), z.t_values.end(), tau);
    if (it != z.t_values.end() && *it == tau) {
      zv = z.z_values[it - z.t_values.begin()];
    }
    out << "<circle class=\"cp\" cx=\"" << s.x(static_cast<double>(tau)) << "\" cy=\""
        << s.y(zv) << "\" r=\"3.5\" fill=\"red\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("short write to " + path);
}

void plot_kde_svg(const std::vector<std::pair<std::string, std::vector<double>>>& sets,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const char* palette[] = {"steelblue", "firebrick", "seagreen", "darkorange",
                           "purple", "teal"};
  double lo = 0.0, hi = 1.0;
  bool first = true;
  std::vector<double> bws;
  for (const auto& [name, v] : sets) {
    if (v.empty()) throw ArgumentError("plot_kde_svg: empty value set for " + name);
    std::vector<double> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    const double mean =
        std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
    double var = 0.0;
    for (double x : sorted) var += (x - mean) * (x - mean);
    var /= std::max<size_t>(1, sorted.size() - 1);
    const double iqr = sorted[sorted.size() * 3 / 4] - sorted[sorted.size() / 4];
    double bw = 0.9 *
                std::min(std::sqrt(var), iqr > 0.0 ? iqr / 1.34 : std::sqrt(var)) *
                std::pow(static_cast<double>(sorted.size()), -0.2);
    if (!(bw > 0.0)) bw = std::max(1e-3, std::fabs(sorted.back()) * 1e-3);
    bws.push_back(bw);
    const double a = sorted.front() - 3 * bw, b = sorted.back() + 3 * bw;
    lo = first ? a : std::min(lo, a);
    hi = first ? b : std::max(hi, b);
    first = false;
  }

  const int grid = 240;
  std::vector<std::vector<double>> dens(sets.size(), std::vector<double>(grid + 1));
  double dmax = 0.0;
  for (size_t k = 0; k < sets.size(); ++k) {
    const auto& v = sets[k].second;
    const double bw = bws[k];
    for (int g = 0; g <= grid; ++g) {
      const double x = lo + (hi - lo) * g / grid;
      double acc = 0.0;
      for (double xi : v) {
        const double u = (x - xi) / bw;
        acc += std::exp(-0.5 * u * u);
      }
      dens[k][g] = acc / (v.size() * bw * std::sqrt(2.0 * M_PI));
      dmax = std::max(dmax, dens[k][g]);
    }
  }
  if (!(dmax > 0.0)) dmax = 1.0;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
      << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\""
      << kW - kRight << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  for (size_t k = 0; k < sets.size(); ++k) {
    const char* color = palette[k % 6];
    out << "<polyline class=\"kde\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (int g = 0; g <= grid; ++g) {
      if (g) out << ' ';
      const double x = kLeft + (kW - kLeft - kRight) * g / grid;
      const double y = kH - kBottom - dens[k][g] / dmax * (kH - kTop - kBottom);
      out << x << ',' << y;
    }
    out << "\"/>\n";
    out << "<text x=\"" << kW - 180 << "\" y=\"" << kTop + 16 + 16 * k
        << "\" font-size=\"12\" fill=\"" << color << "\">" << sets[k].first
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("short write to " + path);
}

void save_stat_series_csv(const cpd::StatSeries& z, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "t,z\n";
  for (size_t i = 0; i < z.t_values.size(); ++i) {
    out << z.t_values[i] << ',' << fmt_double(z.z_values[i]) << "\n";
  }
  if (!out) throw IoError("short write to " + path);
}

cpd::StatSeries load_stat_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  cpd::StatSeries out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) continue;  // header
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 2) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected t,z");
    }
    out.t_values.push_back(
        static_cast<long>(parse_double_strict(cells[0], path, line_no)));
    out.z_values.push_back(parse_double_strict(cells[1], path, line_no));
  }
  return out;
}

void save_indices(const std::vector<long>& indices, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (long v : indices) out << v << "\n";
  if (!out) throw IoError("short write to " + path);
}

}  // namespace otcpd::io
