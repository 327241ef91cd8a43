#include "otcpd.h"

#include <cstring>
#include <string>

#include "json.hpp"

#include "cpd.hpp"
#include "data_io.hpp"
#include "eval.hpp"
#include "gof.hpp"
#include "types.hpp"

using nlohmann::json;

struct otcpd_series {
  otcpd::io::TimeSeries ts;
};

struct otcpd_stat_series {
  otcpd::cpd::StatSeries z;
};

namespace {

thread_local std::string g_last_error;

otcpd_status fail(otcpd_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename F>
otcpd_status guarded(F&& f) {
  try {
    return f();
  } catch (const otcpd::ArgumentError& e) {
    return fail(OTCPD_ERR_ARGUMENT, e.what());
  } catch (const otcpd::DataError& e) {
    return fail(OTCPD_ERR_DATA, e.what());
  } catch (const otcpd::NumericError& e) {
    return fail(OTCPD_ERR_NUMERIC, e.what());
  } catch (const otcpd::IoError& e) {
    return fail(OTCPD_ERR_IO, e.what());
  } catch (const json::exception& e) {
    return fail(OTCPD_ERR_DATA, std::string("json: ") + e.what());
  } catch (const std::exception& e) {
    return fail(OTCPD_ERR_INTERNAL, e.what());
  }
}

otcpd::gof::StatConfig to_stat_config(const otcpd_stat_config& c) {
  otcpd::gof::StatConfig cfg;
  switch (c.kind) {
    case OTCPD_STAT_RE: cfg.kind = otcpd::gof::StatKind::RankEnergy; break;
    case OTCPD_STAT_SRE: cfg.kind = otcpd::gof::StatKind::SoftRankEnergy; break;
    case OTCPD_STAT_ED: cfg.kind = otcpd::gof::StatKind::EnergyDistance; break;
    case OTCPD_STAT_MMD: cfg.kind = otcpd::gof::StatKind::Mmd; break;
    case OTCPD_STAT_W1: cfg.kind = otcpd::gof::StatKind::Wasserstein1; break;
    case OTCPD_STAT_SINKDIV: cfg.kind = otcpd::gof::StatKind::SinkhornDivergence; break;
    default: throw otcpd::ArgumentError("unknown statistic kind");
  }
  cfg.epsilon = c.epsilon;
  cfg.bandwidth = c.bandwidth;
  cfg.ref_seed = c.ref_seed;
  cfg.ref_scheme = c.ref_scheme == OTCPD_REF_HALTON
                       ? otcpd::ranks::RefScheme::Halton
                       : otcpd::ranks::RefScheme::IidUniform;
  if (c.solver_tol > 0.0) cfg.solver.tol = c.solver_tol;
  if (c.solver_max_iter > 0) cfg.solver.max_iter = c.solver_max_iter;
  cfg.solver.median_normalize = c.normalize_cost != 0;
  return cfg;
}

otcpd::Matrix to_matrix(const double* values, long rows, long cols) {
  if (rows < 0 || cols < 1) throw otcpd::ArgumentError("bad matrix shape");
  if (rows > 0 && values == nullptr) {
    throw otcpd::ArgumentError("null values pointer");
  }
  otcpd::Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) m(i, j) = values[i * cols + j];
  }
  return m;
}

otcpd::io::SegmentSpec parse_segment_spec(const std::string& text) {
  const json doc = json::parse(text);
  otcpd::io::SegmentSpec spec;
  spec.d = doc.at("d").get<long>();
  for (const json& js : doc.at("segments")) {
    otcpd::io::Segment seg;
    const std::string dist = js.at("dist").get<std::string>();
    seg.length = js.at("length").get<long>();
    if (dist == "gaussian") {
      seg.dist = otcpd::io::SegDist::Gaussian;
      seg.mean = js.value("mean", 0.0);
      seg.cov_scale = js.value("cov_scale", 1.0);
      if (js.contains("cov")) {
        const auto& rows = js.at("cov");
        seg.cov.resize(rows.size(), rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != rows.size()) {
            throw otcpd::DataError("segment covariance must be square");
          }
          for (size_t j = 0; j < rows.size(); ++j) {
            seg.cov(static_cast<long>(i), static_cast<long>(j)) =
                rows[i][j].get<double>();
          }
        }
      }
    } else if (dist == "laplace") {
      seg.dist = otcpd::io::SegDist::Laplace;
      seg.loc = js.value("loc", 0.0);
      seg.scale = js.value("scale", 1.0);
    } else if (dist == "gamma") {
      seg.dist = otcpd::io::SegDist::Gamma;
      seg.shape = js.value("shape", 1.0);
      seg.rate = js.value("rate", 1.0);
    } else {
      throw otcpd::DataError("unknown segment distribution '" + dist + "'");
    }
    spec.segments.push_back(seg);
  }
  return spec;
}

}  // namespace

extern "C" {

void otcpd_stat_config_init(otcpd_stat_config* cfg) {
  if (!cfg) return;
  std::memset(cfg, 0, sizeof(*cfg));
  cfg->kind = OTCPD_STAT_SRE;
  cfg->epsilon = 1.0;
  cfg->bandwidth = 0.0;
  cfg->ref_scheme = OTCPD_REF_IID_UNIFORM;
  cfg->solver_tol = 0.0;
  cfg->solver_max_iter = 0;
}

void otcpd_detect_config_init(otcpd_detect_config* cfg) {
  if (!cfg) return;
  std::memset(cfg, 0, sizeof(*cfg));
  otcpd_stat_config_init(&cfg->stat);
  cfg->window = 50;
  cfg->eta = 0.0;
  cfg->delta = 50;
  cfg->stride = 1;
  cfg->workers = 1;
}

const char* otcpd_version(void) { return "1.0.0"; }

const char* otcpd_status_name(otcpd_status status) {
  switch (status) {
    case OTCPD_OK: return "ok";
    case OTCPD_ERR_ARGUMENT: return "argument error";
    case OTCPD_ERR_DATA: return "data error";
    case OTCPD_ERR_NUMERIC: return "numerical error";
    case OTCPD_ERR_IO: return "io error";
    case OTCPD_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* otcpd_last_error(void) { return g_last_error.c_str(); }

otcpd_status otcpd_series_create(const double* values, long rows, long cols,
                                 otcpd_series** out) {
  return guarded([&] {
    if (!out) throw otcpd::ArgumentError("null output pointer");
    auto* s = new otcpd_series;
    s->ts.values = to_matrix(values, rows, cols);
    *out = s;
    return OTCPD_OK;
  });
}

otcpd_status otcpd_series_set_truth(otcpd_series* series, const long* truth,
                                    long count) {
  return guarded([&] {
    if (!series) throw otcpd::ArgumentError("null series");
    std::vector<long> t(truth, truth + count);
    std::sort(t.begin(), t.end());
    for (size_t i = 0; i < t.size(); ++i) {
      if (t[i] <= 0 || t[i] >= series->ts.values.rows()) {
        throw otcpd::DataError("truth index out of range");
      }
      if (i > 0 && t[i] == t[i - 1]) throw otcpd::DataError("duplicate truth index");
    }
    series->ts.truth = std::move(t);
    return OTCPD_OK;
  });
}

otcpd_status otcpd_series_load_csv(const char* path, int has_header,
                                   const char* labels_path_or_null,
                                   otcpd_series** out) {
  return guarded([&] {
    if (!out || !path) throw otcpd::ArgumentError("null pointer");
    std::optional<std::string> labels;
    if (labels_path_or_null) labels = labels_path_or_null;
    auto* s = new otcpd_series;
    try {
      s->ts = otcpd::io::load_csv(path, has_header != 0, labels);
    } catch (...) {
      delete s;
      throw;
    }
    *out = s;
    return OTCPD_OK;
  });
}

otcpd_status otcpd_series_save_csv(const otcpd_series* series, const char* path,
                                   const char* labels_path_or_null) {
  return guarded([&] {
    if (!series || !path) throw otcpd::ArgumentError("null pointer");
    std::optional<std::string> labels;
    if (labels_path_or_null) labels = labels_path_or_null;
    otcpd::io::save_csv(series->ts, path, labels);
    return OTCPD_OK;
  });
}

long otcpd_series_rows(const otcpd_series* series) {
  return series ? series->ts.values.rows() : -1;
}

long otcpd_series_cols(const otcpd_series* series) {
  return series ? series->ts.values.cols() : -1;
}

long otcpd_series_truth_count(const otcpd_series* series) {
  return series ? static_cast<long>(series->ts.truth.size()) : -1;
}

otcpd_status otcpd_series_copy_truth(const otcpd_series* series, long* out,
                                     long capacity) {
  return guarded([&] {
    if (!series || !out) throw otcpd::ArgumentError("null pointer");
    if (capacity < static_cast<long>(series->ts.truth.size())) {
      throw otcpd::ArgumentError("capacity too small");
    }
    std::copy(series->ts.truth.begin(), series->ts.truth.end(), out);
    return OTCPD_OK;
  });
}

otcpd_status otcpd_series_copy_values(const otcpd_series* series, double* out,
                                      long capacity) {
  return guarded([&] {
    if (!series || !out) throw otcpd::ArgumentError("null pointer");
    const long need = series->ts.values.rows() * series->ts.values.cols();
    if (capacity < need) throw otcpd::ArgumentError("capacity too small");
    for (long i = 0; i < series->ts.values.rows(); ++i) {
      for (long j = 0; j < series->ts.values.cols(); ++j) {
        out[i * series->ts.values.cols() + j] = series->ts.values(i, j);
      }
    }
    return OTCPD_OK;
  });
}

void otcpd_series_free(otcpd_series* series) { delete series; }

otcpd_status otcpd_generate_benchmark(uint64_t seed, long dim, otcpd_series** out) {
  return guarded([&] {
    if (!out) throw otcpd::ArgumentError("null output pointer");
    auto* s = new otcpd_series;
    try {
      s->ts = otcpd::io::generate_synthetic(otcpd::io::synthetic_benchmark_spec(dim),
                                            seed);
    } catch (...) {
      delete s;
      throw;
    }
    *out = s;
    return OTCPD_OK;
  });
}

otcpd_status otcpd_generate_from_json(const char* spec_json, uint64_t seed,
                                      otcpd_series** out) {
  return guarded([&] {
    if (!out || !spec_json) throw otcpd::ArgumentError("null pointer");
    const otcpd::io::SegmentSpec spec = parse_segment_spec(spec_json);
    auto* s = new otcpd_series;
    try {
      s->ts = otcpd::io::generate_synthetic(spec, seed);
    } catch (...) {
      delete s;
      throw;
    }
    *out = s;
    return OTCPD_OK;
  });
}

otcpd_status otcpd_two_sample_stat(const otcpd_stat_config* cfg, const double* x,
                                   long m, const double* y, long n, long d,
                                   double* value_out) {
  return guarded([&] {
    if (!cfg || !value_out) throw otcpd::ArgumentError("null pointer");
    const otcpd::Matrix mx = to_matrix(x, m, d);
    const otcpd::Matrix my = to_matrix(y, n, d);
    *value_out = otcpd::gof::evaluate_stat(to_stat_config(*cfg), mx, my);
    return OTCPD_OK;
  });
}

otcpd_status otcpd_detect(const otcpd_series* series,
                          const otcpd_detect_config* cfg,
                          otcpd_stat_series** z_out) {
  return guarded([&] {
    if (!series || !cfg || !z_out) throw otcpd::ArgumentError("null pointer");
    otcpd::cpd::StatSeries z = otcpd::cpd::sliding_statistic(
        series->ts.values, cfg->window, to_stat_config(cfg->stat), cfg->stride,
        cfg->workers);
    if (cfg->strict && z.warnings > 0) {
      throw otcpd::NumericError(std::to_string(z.warnings) +
                                " windows did not reach solver tolerance");
    }
    *z_out = new otcpd_stat_series{std::move(z)};
    return OTCPD_OK;
  });
}

long otcpd_stat_series_count(const otcpd_stat_series* z) {
  return z ? static_cast<long>(z->z.t_values.size()) : -1;
}

long otcpd_stat_series_warnings(const otcpd_stat_series* z) {
  return z ? z->z.warnings : -1;
}

otcpd_status otcpd_stat_series_copy(const otcpd_stat_series* z, long* t_out,
                                    double* z_values_out, long capacity) {
  return guarded([&] {
    if (!z || !t_out || !z_values_out) throw otcpd::ArgumentError("null pointer");
    if (capacity < static_cast<long>(z->z.t_values.size())) {
      throw otcpd::ArgumentError("capacity too small");
    }
    std::copy(z->z.t_values.begin(), z->z.t_values.end(), t_out);
    std::copy(z->z.z_values.begin(), z->z.z_values.end(), z_values_out);
    return OTCPD_OK;
  });
}

otcpd_status otcpd_stat_series_create(const long* t, const double* z, long count,
                                      otcpd_stat_series** out) {
  return guarded([&] {
    if (!out || (count > 0 && (!t || !z))) {
      throw otcpd::ArgumentError("null pointer");
    }
    auto* s = new otcpd_stat_series;
    s->z.t_values.assign(t, t + count);
    s->z.z_values.assign(z, z + count);
    *out = s;
    return OTCPD_OK;
  });
}

otcpd_status otcpd_stat_series_save_csv(const otcpd_stat_series* z,
                                        const char* path) {
  return guarded([&] {
    if (!z || !path) throw otcpd::ArgumentError("null pointer");
    otcpd::io::save_stat_series_csv(z->z, path);
    return OTCPD_OK;
  });
}

otcpd_status otcpd_stat_series_load_csv(const char* path, otcpd_stat_series** out) {
  return guarded([&] {
    if (!out || !path) throw otcpd::ArgumentError("null pointer");
    auto* s = new otcpd_stat_series;
    try {
      s->z = otcpd::io::load_stat_series_csv(path);
    } catch (...) {
      delete s;
      throw;
    }
    *out = s;
    return OTCPD_OK;
  });
}

void otcpd_stat_series_free(otcpd_stat_series* z) { delete z; }

otcpd_status otcpd_peak_search(const otcpd_stat_series* z, double eta, long delta,
                               long* indices_out, long capacity, long* count_out) {
  return guarded([&] {
    if (!z || !count_out) throw otcpd::ArgumentError("null pointer");
    otcpd::cpd::ChangePointSet cps = otcpd::cpd::peak_search(z->z, eta, delta);
    *count_out = static_cast<long>(cps.indices.size());
    if (indices_out) {
      if (capacity < *count_out) throw otcpd::ArgumentError("capacity too small");
      std::copy(cps.indices.begin(), cps.indices.end(), indices_out);
    }
    return OTCPD_OK;
  });
}

otcpd_status otcpd_evaluate(const otcpd_stat_series* z, const long* truth,
                            long truth_count, long xi, long delta,
                            otcpd_eval_result* out) {
  return guarded([&] {
    if (!z || !out || (truth_count > 0 && !truth)) {
      throw otcpd::ArgumentError("null pointer");
    }
    const std::vector<long> tv(truth, truth + truth_count);
    const auto [f1, eta] = otcpd::eval::best_f1(z->z, tv, xi, delta);
    const otcpd::eval::PrCurve pr = otcpd::eval::auc_pr(z->z, tv, xi, delta);
    const otcpd::cpd::ChangePointSet cps = otcpd::cpd::peak_search(z->z, eta, delta);
    const otcpd::eval::MatchResult m =
        otcpd::eval::match_changepoints(cps.indices, tv, xi);
    const otcpd::eval::Prf prf = otcpd::eval::precision_recall_f1(m);
    out->auc_pr = pr.auc;
    out->best_f1 = f1;
    out->best_eta = eta;
    out->tp = m.tp;
    out->fp = m.fp;
    out->fn = m.fn;
    out->precision = prf.precision;
    out->recall = prf.recall;
    return OTCPD_OK;
  });
}

otcpd_status otcpd_match_counts(const long* pred, long pred_count,
                                const long* truth, long truth_count, long xi,
                                long* tp, long* fp, long* fn) {
  return guarded([&] {
    if ((pred_count > 0 && !pred) || (truth_count > 0 && !truth) || !tp || !fp ||
        !fn) {
      throw otcpd::ArgumentError("null pointer");
    }
    const otcpd::eval::MatchResult m = otcpd::eval::match_changepoints(
        std::vector<long>(pred, pred + pred_count),
        std::vector<long>(truth, truth + truth_count), xi);
    *tp = m.tp;
    *fp = m.fp;
    *fn = m.fn;
    return OTCPD_OK;
  });
}

otcpd_status otcpd_null_calibration(const otcpd_stat_config* cfg,
                                    const double* pooled, long total, long d,
                                    long m, long b, uint64_t seed,
                                    double* values_out) {
  return guarded([&] {
    if (!cfg || !values_out) throw otcpd::ArgumentError("null pointer");
    const otcpd::Matrix p = to_matrix(pooled, total, d);
    const otcpd::gof::NullSample ns =
        otcpd::gof::null_calibration(p, m, total - m, to_stat_config(*cfg), b, seed);
    std::copy(ns.values.begin(), ns.values.end(), values_out);
    return OTCPD_OK;
  });
}

otcpd_status otcpd_plot_detection_svg(const otcpd_stat_series* z, const long* cps,
                                      long cps_count, const long* truth,
                                      long truth_count, double eta,
                                      const char* path) {
  return guarded([&] {
    if (!z || !path) throw otcpd::ArgumentError("null pointer");
    otcpd::cpd::ChangePointSet set;
    if (cps_count > 0) set.indices.assign(cps, cps + cps_count);
    set.eta = eta;
    std::vector<long> tv;
    if (truth_count > 0) tv.assign(truth, truth + truth_count);
    otcpd::io::plot_svg(z->z, set, tv, eta, path);
    return OTCPD_OK;
  });
}

otcpd_status otcpd_plot_kde_svg(const char* const* names,
                                const double* const* value_arrays,
                                const long* value_counts, long set_count,
                                const char* path) {
  return guarded([&] {
    if (!names || !value_arrays || !value_counts || !path || set_count < 1) {
      throw otcpd::ArgumentError("bad arguments");
    }
    std::vector<std::pair<std::string, std::vector<double>>> sets;
    for (long k = 0; k < set_count; ++k) {
      sets.emplace_back(names[k],
                        std::vector<double>(value_arrays[k],
                                            value_arrays[k] + value_counts[k]));
    }
    otcpd::io::plot_kde_svg(sets, path);
    return OTCPD_OK;
  });
}

}  // extern "C"
