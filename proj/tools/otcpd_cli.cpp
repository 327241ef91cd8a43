// otcpd command line: synthetic generation, sliding-window change point
// detection, evaluation, parameter sweeps and permutation-null calibration.
// Built entirely on the public C interface.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "otcpd.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CliError {
  int code;
  std::string message;
};

void require_ok(otcpd_status status) {
  if (status == OTCPD_OK) return;
  int code = kExitData;
  if (status == OTCPD_ERR_ARGUMENT) code = kExitUsage;
  if (status == OTCPD_ERR_NUMERIC) code = kExitNumeric;
  throw CliError{code, std::string(otcpd_status_name(status)) + ": " +
                           otcpd_last_error()};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct Options {
  std::string input;
  std::string labels;
  std::string output_dir = "otcpd-out";
  std::string preset;
  std::string config_path;
  std::string stat = "sre";
  double epsilon = 0.1;
  double bandwidth = 0.0;
  long window = 50;
  double eta = 0.0;
  long delta = -1;  // resolves to window
  long xi = 20;
  long stride = 1;
  std::uint64_t seed = 0;
  int workers = 1;
  bool strict = false;
  bool header = true;
  std::string ref_scheme = "iid";
  bool normalize_cost = false;
  double solver_tol = 1e-6;
  // generate
  long dim = 10;
  std::string spec_path;
  // sweep
  long instances = 25;
  std::string grid_n = "25,50,100,200";
  std::string grid_stats = "re,sre";
  std::string grid_eps = "0.1,1,10";
  // null
  long null_m = 200;
  long null_b = 1000;
  std::string dists = "gaussian,laplace";
};

struct Preset {
  long window;
  long xi;
  long delta;
  double epsilon;
};

// Detection hyperparameters bundled per dataset family.
const std::map<std::string, Preset> kPresets = {
    {"paper-synthetic", {50, 20, 50, 0.1}},
    {"hasc", {500, 200, 250, 0.1}},
    {"hasc2011", {500, 200, 250, 0.1}},
    {"beedance", {20, 10, 10, 1.0}},
    {"salinas", {10, 2, 2, 1.0}},
    {"ecg", {50, 20, 25, 0.1}},
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

otcpd_stat_kind parse_stat(const std::string& name) {
  if (name == "re") return OTCPD_STAT_RE;
  if (name == "sre") return OTCPD_STAT_SRE;
  if (name == "ed") return OTCPD_STAT_ED;
  if (name == "mmd") return OTCPD_STAT_MMD;
  if (name == "w1") return OTCPD_STAT_W1;
  if (name == "sinkdiv") return OTCPD_STAT_SINKDIV;
  throw CliError{kExitUsage, "unknown statistic '" + name +
                                 "' (expected re|sre|ed|mmd|w1|sinkdiv)"};
}

bool stat_uses_epsilon(otcpd_stat_kind kind) {
  return kind == OTCPD_STAT_SRE || kind == OTCPD_STAT_SINKDIV;
}

otcpd_stat_config stat_config_from(const Options& opt) {
  otcpd_stat_config cfg;
  otcpd_stat_config_init(&cfg);
  cfg.kind = parse_stat(opt.stat);
  cfg.epsilon = opt.epsilon;
  cfg.bandwidth = opt.bandwidth;
  cfg.ref_seed = opt.seed;
  cfg.ref_scheme =
      opt.ref_scheme == "halton" ? OTCPD_REF_HALTON : OTCPD_REF_IID_UNIFORM;
  cfg.normalize_cost = opt.normalize_cost ? 1 : 0;
  cfg.solver_tol = opt.solver_tol;
  return cfg;
}

json config_echo(const std::string& command, const Options& opt) {
  json j;
  j["schema"] = "otcpd-config-v1";
  j["command"] = command;
  j["input"] = opt.input;
  j["labels"] = opt.labels;
  j["output_dir"] = opt.output_dir;
  j["preset"] = opt.preset;
  j["stat"] = opt.stat;
  j["epsilon"] = opt.epsilon;
  j["bandwidth"] = opt.bandwidth;
  j["window"] = opt.window;
  j["eta"] = opt.eta;
  j["delta"] = opt.delta;
  j["xi"] = opt.xi;
  j["stride"] = opt.stride;
  j["seed"] = opt.seed;
  j["workers"] = opt.workers;
  j["strict"] = opt.strict;
  j["header"] = opt.header;
  j["ref_scheme"] = opt.ref_scheme;
  j["normalize_cost"] = opt.normalize_cost;
  j["solver_tol"] = opt.solver_tol;
  j["dim"] = opt.dim;
  j["spec"] = opt.spec_path;
  j["instances"] = opt.instances;
  j["grid_n"] = opt.grid_n;
  j["grid_stats"] = opt.grid_stats;
  j["grid_eps"] = opt.grid_eps;
  j["null_m"] = opt.null_m;
  j["null_b"] = opt.null_b;
  j["dists"] = opt.dists;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CliError{kExitData, "cannot write " + path.string()};
  out << text;
  if (!out) throw CliError{kExitData, "short write to " + path.string()};
}

void write_config(const std::string& command, const Options& opt) {
  write_text(fs::path(opt.output_dir) / "config.json",
             config_echo(command, opt).dump(2) + "\n");
}

void ensure_output_dir(const Options& opt) {
  std::error_code ec;
  fs::create_directories(opt.output_dir, ec);
  if (ec) {
    throw CliError{kExitData, "cannot create output dir " + opt.output_dir + ": " +
                                  ec.message()};
  }
}

struct SeriesHandle {
  otcpd_series* ptr = nullptr;
  ~SeriesHandle() { otcpd_series_free(ptr); }
};

struct StatSeriesHandle {
  otcpd_stat_series* ptr = nullptr;
  ~StatSeriesHandle() { otcpd_stat_series_free(ptr); }
};

std::vector<long> series_truth(const otcpd_series* s) {
  std::vector<long> truth(otcpd_series_truth_count(s));
  if (!truth.empty()) {
    require_ok(otcpd_series_copy_truth(s, truth.data(), truth.size()));
  }
  return truth;
}

std::string report_line(const std::string& dataset, const std::string& method,
                        double epsilon, long n, std::uint64_t seed,
                        const std::string& metric, double value) {
  json j;
  j["schema"] = "otcpd-report-v1";
  j["dataset"] = dataset;
  j["method"] = method;
  j["epsilon"] = epsilon;
  j["n"] = n;
  j["seed"] = seed;
  j["metric"] = metric;
  j["value"] = value;
  return j.dump() + "\n";
}

// ---- commands --------------------------------------------------------

int cmd_generate(const Options& opt) {
  ensure_output_dir(opt);
  SeriesHandle series;
  if (!opt.spec_path.empty()) {
    std::ifstream in(opt.spec_path);
    if (!in) throw CliError{kExitData, "cannot open " + opt.spec_path};
    std::stringstream buf;
    buf << in.rdbuf();
    require_ok(otcpd_generate_from_json(buf.str().c_str(), opt.seed, &series.ptr));
  } else {
    // default preset: the 10-segment benchmark schedule
    require_ok(otcpd_generate_benchmark(opt.seed, opt.dim, &series.ptr));
  }
  const fs::path dir(opt.output_dir);
  require_ok(otcpd_series_save_csv(series.ptr, (dir / "series.csv").c_str(),
                                   (dir / "labels.txt").c_str()));
  write_config("generate", opt);
  std::cout << "wrote " << (dir / "series.csv").string() << " ("
            << otcpd_series_rows(series.ptr) << " rows, "
            << otcpd_series_cols(series.ptr) << " cols, "
            << otcpd_series_truth_count(series.ptr) << " change points)\n";
  return kExitOk;
}

StatSeriesHandle run_detect(const Options& opt, const otcpd_series* series) {
  otcpd_detect_config cfg;
  otcpd_detect_config_init(&cfg);
  cfg.stat = stat_config_from(opt);
  cfg.window = opt.window;
  cfg.eta = opt.eta;
  cfg.delta = opt.delta > 0 ? opt.delta : opt.window;
  cfg.stride = opt.stride;
  cfg.workers = opt.workers;
  cfg.strict = opt.strict ? 1 : 0;
  StatSeriesHandle z;
  require_ok(otcpd_detect(series, &cfg, &z.ptr));
  if (otcpd_stat_series_warnings(z.ptr) > 0) {
    std::cerr << "warning: " << otcpd_stat_series_warnings(z.ptr)
              << " windows did not reach solver tolerance\n";
  }
  return z;
}

int cmd_detect(const Options& opt) {
  if (opt.input.empty()) throw CliError{kExitUsage, "detect requires --input"};
  ensure_output_dir(opt);
  SeriesHandle series;
  require_ok(otcpd_series_load_csv(opt.input.c_str(), opt.header ? 1 : 0,
                                   opt.labels.empty() ? nullptr : opt.labels.c_str(),
                                   &series.ptr));
  StatSeriesHandle z = run_detect(opt, series.ptr);

  const long delta = opt.delta > 0 ? opt.delta : opt.window;
  long n_peaks = 0;
  require_ok(otcpd_peak_search(z.ptr, opt.eta, delta, nullptr, 0, &n_peaks));
  std::vector<long> peaks(n_peaks);
  if (n_peaks > 0) {
    require_ok(
        otcpd_peak_search(z.ptr, opt.eta, delta, peaks.data(), n_peaks, &n_peaks));
  }

  const fs::path dir(opt.output_dir);
  require_ok(otcpd_stat_series_save_csv(z.ptr, (dir / "z.csv").c_str()));
  {
    std::ostringstream body;
    for (long p : peaks) body << p << "\n";
    write_text(dir / "predictions.txt", body.str());
  }
  const std::vector<long> truth = series_truth(series.ptr);
  require_ok(otcpd_plot_detection_svg(
      z.ptr, peaks.data(), n_peaks, truth.empty() ? nullptr : truth.data(),
      static_cast<long>(truth.size()), opt.eta, (dir / "plot.svg").c_str()));
  write_config("detect", opt);
  std::cout << "wrote " << (dir / "z.csv").string() << " ("
            << otcpd_stat_series_count(z.ptr) << " points), " << n_peaks
            << " predicted change points\n";
  return kExitOk;
}

int cmd_evaluate(const Options& opt) {
  if (opt.input.empty()) throw CliError{kExitUsage, "evaluate requires --input (a z.csv)"};
  if (opt.labels.empty()) throw CliError{kExitUsage, "evaluate requires --labels"};
  ensure_output_dir(opt);
  StatSeriesHandle z;
  require_ok(otcpd_stat_series_load_csv(opt.input.c_str(), &z.ptr));

  std::vector<long> truth;
  {
    std::ifstream in(opt.labels);
    if (!in) throw CliError{kExitData, "cannot open " + opt.labels};
    long v;
    while (in >> v) truth.push_back(v);
    std::sort(truth.begin(), truth.end());
  }
  const long delta = opt.delta > 0 ? opt.delta : opt.window;
  otcpd_eval_result res;
  require_ok(otcpd_evaluate(z.ptr, truth.data(), static_cast<long>(truth.size()),
                            opt.xi, delta, &res));

  const std::string dataset =
      opt.input.empty() ? "series" : fs::path(opt.input).stem().string();
  std::ostringstream report;
  report << report_line(dataset, opt.stat, opt.epsilon, opt.window, opt.seed,
                        "auc_pr", res.auc_pr)
         << report_line(dataset, opt.stat, opt.epsilon, opt.window, opt.seed,
                        "best_f1", res.best_f1)
         << report_line(dataset, opt.stat, opt.epsilon, opt.window, opt.seed,
                        "best_eta", res.best_eta)
         << report_line(dataset, opt.stat, opt.epsilon, opt.window, opt.seed,
                        "precision_at_best", res.precision)
         << report_line(dataset, opt.stat, opt.epsilon, opt.window, opt.seed,
                        "recall_at_best", res.recall)
         << report_line(dataset, opt.stat, opt.epsilon, opt.window, opt.seed, "tp",
                        res.tp)
         << report_line(dataset, opt.stat, opt.epsilon, opt.window, opt.seed, "fp",
                        res.fp)
         << report_line(dataset, opt.stat, opt.epsilon, opt.window, opt.seed, "fn",
                        res.fn);
  write_text(fs::path(opt.output_dir) / "report.jsonl", report.str());
  write_config("evaluate", opt);
  std::printf("auc_pr %.6f  best_f1 %.6f  best_eta %.9g  (tp %ld fp %ld fn %ld)\n",
              res.auc_pr, res.best_f1, res.best_eta, res.tp, res.fp, res.fn);
  return kExitOk;
}

int cmd_sweep(const Options& opt) {
  ensure_output_dir(opt);
  const std::vector<std::string> ns = split_list(opt.grid_n);
  const std::vector<std::string> stats = split_list(opt.grid_stats);
  const std::vector<std::string> eps_list = split_list(opt.grid_eps);
  if (ns.empty() || stats.empty()) {
    throw CliError{kExitUsage, "sweep grids must be non-empty"};
  }

  struct Cell {
    std::string method;
    double epsilon;
    long n;
    double sum_auc = 0.0;
    double sum_f1 = 0.0;
    long count = 0;
  };
  std::vector<Cell> cells;
  for (const std::string& stat_name : stats) {
    const otcpd_stat_kind kind = parse_stat(stat_name);
    const std::vector<std::string> eps_axis =
        stat_uses_epsilon(kind) ? eps_list : std::vector<std::string>{"0"};
    for (const std::string& e : eps_axis) {
      for (const std::string& n : ns) {
        cells.push_back({stat_name, std::stod(e), std::stol(n), 0.0, 0.0, 0});
      }
    }
  }

  std::ostringstream report;
  for (long inst = 0; inst < opt.instances; ++inst) {
    const std::uint64_t inst_seed = mix_seed(opt.seed, inst);
    SeriesHandle series;
    require_ok(otcpd_generate_benchmark(inst_seed, opt.dim, &series.ptr));
    const std::vector<long> truth = series_truth(series.ptr);
    for (Cell& cell : cells) {
      Options run = opt;
      run.stat = cell.method;
      run.epsilon = cell.epsilon;
      run.window = cell.n;
      run.delta = cell.n;  // synthetic convention: delta matches the window
      run.seed = inst_seed;
      StatSeriesHandle z = run_detect(run, series.ptr);
      otcpd_eval_result res;
      require_ok(otcpd_evaluate(z.ptr, truth.data(),
                                static_cast<long>(truth.size()), opt.xi, cell.n,
                                &res));
      cell.sum_auc += res.auc_pr;
      cell.sum_f1 += res.best_f1;
      cell.count += 1;
      report << report_line("synthetic", cell.method, cell.epsilon, cell.n,
                            inst_seed, "auc_pr", res.auc_pr)
             << report_line("synthetic", cell.method, cell.epsilon, cell.n,
                            inst_seed, "best_f1", res.best_f1);
    }
    std::cerr << "instance " << (inst + 1) << "/" << opt.instances << " done\n";
  }

  write_text(fs::path(opt.output_dir) / "sweep.jsonl", report.str());

  auto method_label = [](const Cell& c) {
    std::string label = c.method;
    if (c.epsilon > 0.0 &&
        (c.method == "sre" || c.method == "sinkdiv")) {
      std::ostringstream os;
      os << c.method << "(eps=" << c.epsilon << ")";
      label = os.str();
    }
    return label;
  };

  std::ostringstream table;
  for (const char* metric : {"mean AUC-PR", "mean best F1"}) {
    const bool auc = std::string(metric) == "mean AUC-PR";
    table << metric << " over " << opt.instances << " instances\n";
    table << "method";
    for (const std::string& n : ns) table << "\tn=" << n;
    table << "\n";
    std::string last_label;
    for (const Cell& c : cells) {
      const std::string label = method_label(c);
      if (label != last_label) {
        if (!last_label.empty()) table << "\n";
        table << label;
        last_label = label;
      }
      char buf[32];
      std::snprintf(buf, sizeof(buf), "\t%.3f",
                    (auc ? c.sum_auc : c.sum_f1) / std::max(1L, c.count));
      table << buf;
    }
    table << "\n\n";
  }
  write_text(fs::path(opt.output_dir) / "sweep_table.txt", table.str());
  write_config("sweep", opt);
  std::cout << table.str();
  return kExitOk;
}

int cmd_null(const Options& opt) {
  ensure_output_dir(opt);
  const std::vector<std::string> settings = split_list(opt.dists);
  if (settings.empty()) throw CliError{kExitUsage, "null requires --dist"};
  const long total = 2 * opt.null_m;

  std::vector<std::pair<std::string, std::vector<double>>> all;
  for (const std::string& name : settings) {
    json spec;
    spec["d"] = opt.dim;
    json seg;
    seg["length"] = total;
    if (name == "gaussian") {
      seg["dist"] = "gaussian";
      seg["mean"] = 0.0;
      seg["cov_scale"] = 1.0;
    } else if (name == "gaussian-diag") {
      seg["dist"] = "gaussian";
      seg["mean"] = 0.0;
      json cov = json::array();
      for (long i = 0; i < opt.dim; ++i) {
        json row = json::array();
        for (long j = 0; j < opt.dim; ++j) {
          row.push_back(i == j ? (i % 2 ? 4.0 : 0.25) : 0.0);
        }
        cov.push_back(row);
      }
      seg["cov"] = cov;
    } else if (name == "laplace") {
      seg["dist"] = "laplace";
      seg["loc"] = 0.0;
      seg["scale"] = 1.0;
    } else if (name == "gamma") {
      seg["dist"] = "gamma";
      seg["shape"] = 2.0;
      seg["rate"] = 2.0;
    } else {
      throw CliError{kExitUsage,
                     "unknown --dist '" + name +
                         "' (expected gaussian|gaussian-diag|laplace|gamma)"};
    }
    spec["segments"] = json::array({seg});

    SeriesHandle pooled;
    require_ok(otcpd_generate_from_json(spec.dump().c_str(), opt.seed, &pooled.ptr));
    std::vector<double> values(total * opt.dim);
    require_ok(otcpd_series_copy_values(pooled.ptr, values.data(),
                                        static_cast<long>(values.size())));

    std::vector<double> null_values(opt.null_b);
    const otcpd_stat_config cfg = stat_config_from(opt);
    require_ok(otcpd_null_calibration(&cfg, values.data(), total, opt.dim,
                                      opt.null_m, opt.null_b, opt.seed,
                                      null_values.data()));
    std::ostringstream body;
    for (double v : null_values) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g\n", v);
      body << buf;
    }
    write_text(fs::path(opt.output_dir) / ("null_" + name + ".csv"), body.str());
    all.emplace_back(name, std::move(null_values));
  }

  std::vector<const char*> names;
  std::vector<const double*> arrays;
  std::vector<long> counts;
  for (const auto& [name, values] : all) {
    names.push_back(name.c_str());
    arrays.push_back(values.data());
    counts.push_back(static_cast<long>(values.size()));
  }
  require_ok(otcpd_plot_kde_svg(names.data(), arrays.data(), counts.data(),
                                static_cast<long>(names.size()),
                                (fs::path(opt.output_dir) / "null_kde.svg").c_str()));
  write_config("null", opt);
  std::cout << "wrote " << all.size() << " null sample sets of " << opt.null_b
            << " values each\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal-transport rank statistics for change point detection"};
  app.require_subcommand(1);

  Options opt;
  std::vector<CLI::Option*> tracked;

  auto add_shared = [&](CLI::App* cmd) {
    cmd->add_option("--input", opt.input, "input CSV path");
    cmd->add_option("--labels", opt.labels, "label file (one 0-based index per line)");
    cmd->add_option("--output-dir", opt.output_dir, "output directory");
    cmd->add_option("--stat", opt.stat, "re|sre|ed|mmd|w1|sinkdiv");
    tracked.push_back(cmd->add_option("--epsilon", opt.epsilon,
                                      "regularization for sre/sinkdiv"));
    cmd->add_option("--bandwidth", opt.bandwidth,
                    "mmd kernel bandwidth (<=0: median heuristic)");
    tracked.push_back(cmd->add_option("--window", opt.window, "window size n"));
    cmd->add_option("--eta", opt.eta, "detection threshold");
    tracked.push_back(
        cmd->add_option("--delta", opt.delta, "min peak distance (default: window)"));
    tracked.push_back(cmd->add_option("--xi", opt.xi, "matching margin"));
    cmd->add_option("--stride", opt.stride, "window stride");
    cmd->add_option("--seed", opt.seed, "run seed")->envname("OTCPD_SEED");
    cmd->add_option("--workers", opt.workers, "worker threads");
    cmd->add_option("--preset", opt.preset,
                    "paper-synthetic|hasc|hasc2011|beedance|salinas|ecg");
    cmd->add_flag("--strict", opt.strict, "treat solver non-convergence as fatal");
    cmd->add_flag("!--no-header", opt.header, "input CSV has no header row");
    cmd->add_option("--ref-scheme", opt.ref_scheme, "iid|halton reference points");
    cmd->add_flag("--normalize-cost", opt.normalize_cost,
                  "epsilon relative to the median cost entry");
    cmd->add_option("--solver-tol", opt.solver_tol,
                    "sinkhorn marginal tolerance for detection runs");
    cmd->add_option("--config", opt.config_path,
                    "replay a config.json written by a previous run");
  };

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic series");
  add_shared(generate);
  generate->add_option("--dim", opt.dim, "dimension for the benchmark schedule");
  generate->add_option("--spec", opt.spec_path, "segment spec JSON file");

  CLI::App* detect = app.add_subcommand("detect", "sliding-window detection");
  add_shared(detect);

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a z series");
  add_shared(evaluate);

  CLI::App* sweep = app.add_subcommand("sweep", "grid over n x statistic x epsilon");
  add_shared(sweep);
  sweep->add_option("--dim", opt.dim, "benchmark dimension");
  sweep->add_option("--instances", opt.instances, "seeded instances per cell");
  sweep->add_option("--grid-n", opt.grid_n, "comma list of window sizes");
  sweep->add_option("--grid-stats", opt.grid_stats, "comma list of statistics");
  sweep->add_option("--grid-eps", opt.grid_eps, "comma list of epsilons");

  CLI::App* null_cmd = app.add_subcommand("null", "permutation null calibration");
  add_shared(null_cmd);
  null_cmd->add_option("--dim", opt.dim, "sample dimension");
  null_cmd->add_option("-m,--null-m", opt.null_m, "half size of the pooled sample");
  null_cmd->add_option("-B,--null-b", opt.null_b, "number of random splits");
  null_cmd->add_option("--dist", opt.dists,
                       "comma list: gaussian|gaussian-diag|laplace|gamma");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* cmd = app.get_subcommands().front();

    // resolution order: explicit flag > --config replay > preset > default
    if (!opt.config_path.empty()) {
      std::ifstream in(opt.config_path);
      if (!in) throw CliError{kExitData, "cannot open " + opt.config_path};
      json j = json::parse(in, nullptr, true, true);
      auto maybe = [&](const char* flag, const char* key, auto& field) {
        using T = std::decay_t<decltype(field)>;
        const CLI::Option* o = cmd->get_option_no_throw(flag);
        if ((!o || o->count() == 0) && j.contains(key)) {
          field = j.at(key).get<T>();
        }
      };
      // only fields that affect numerics; paths stay explicit
      maybe("--stat", "stat", opt.stat);
      maybe("--epsilon", "epsilon", opt.epsilon);
      maybe("--bandwidth", "bandwidth", opt.bandwidth);
      maybe("--window", "window", opt.window);
      maybe("--eta", "eta", opt.eta);
      maybe("--delta", "delta", opt.delta);
      maybe("--xi", "xi", opt.xi);
      maybe("--stride", "stride", opt.stride);
      maybe("--seed", "seed", opt.seed);
      maybe("--strict", "strict", opt.strict);
      maybe("--no-header", "header", opt.header);
      maybe("--ref-scheme", "ref_scheme", opt.ref_scheme);
      maybe("--normalize-cost", "normalize_cost", opt.normalize_cost);
      maybe("--solver-tol", "solver_tol", opt.solver_tol);
      maybe("--dim", "dim", opt.dim);
      maybe("--instances", "instances", opt.instances);
      if (cmd->count("--preset") == 0 && j.contains("preset")) {
        opt.preset = j.at("preset").get<std::string>();
      }
    }

    if (!opt.preset.empty()) {
      const auto it = kPresets.find(opt.preset);
      if (it == kPresets.end()) {
        throw CliError{kExitUsage, "unknown preset '" + opt.preset + "'"};
      }
      // preset fills anything the user did not set explicitly
      if (cmd->count("--window") == 0) opt.window = it->second.window;
      if (cmd->count("--xi") == 0) opt.xi = it->second.xi;
      if (cmd->count("--delta") == 0) opt.delta = it->second.delta;
      if (cmd->count("--epsilon") == 0) opt.epsilon = it->second.epsilon;
    }

    if (cmd->get_name() == "generate") return cmd_generate(opt);
    if (cmd->get_name() == "detect") return cmd_detect(opt);
    if (cmd->get_name() == "evaluate") return cmd_evaluate(opt);
    if (cmd->get_name() == "sweep") return cmd_sweep(opt);
    if (cmd->get_name() == "null") return cmd_null(opt);
    throw CliError{kExitUsage, "unknown command"};
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
