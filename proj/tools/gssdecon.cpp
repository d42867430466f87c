// gssdecon command-line tool: deconvolve, simulate, ingest.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gssdecon/bandwidth.hpp"
#include "gssdecon/errors.hpp"
#include "gssdecon/estimator.hpp"
#include "gssdecon/harness.hpp"
#include "gssdecon/ingestion.hpp"
#include "gssdecon/selection.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace gssd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitConfig = 4;

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Parse:
      return kExitParse;
    case ErrorKind::Config:
    case ErrorKind::Domain:
      return kExitConfig;
    default:
      return kExitEstimation;
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// All outputs of a command, written only after everything has been computed.
class OutputSet {
 public:
  void add(std::string path, std::string content) {
    files_.push_back({std::move(path), std::move(content)});
  }

  // Temp file + rename per output; on failure every temp and renamed file is removed.
  void commit() {
    std::vector<std::pair<fs::path, fs::path>> staged;
    std::vector<fs::path> done;
    try {
      for (const auto& [path, content] : files_) {
        const fs::path target(path);
        fs::path tmp = target;
        tmp += ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Config, "cannot write '" + path + "'");
        staged.emplace_back(tmp, target);
        out << content;
        out.close();
        if (!out) throw Error(ErrorKind::Config, "failed writing '" + path + "'");
      }
      for (const auto& [tmp, target] : staged) {
        fs::rename(tmp, target);
        done.push_back(target);
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& [tmp, target] : staged) fs::remove(tmp, ec);
      for (const auto& p : done) fs::remove(p, ec);
      throw;
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

Json selection_json(const SelectionRecord& s) {
  Json j;
  j["criterion"] = to_string(s.criterion);
  j["chosen"] = s.chosen;
  j["scores"] = s.scores;
  j["tstar"] = s.tstar;
  j["weight_exponent"] = s.weight_exponent;
  j["warnings"] = s.warnings;
  return j;
}

struct IngestOptions {
  std::string mode;  // "", "paired" or "replicate"
  double shift = 50.0;
  bool no_log = false;
};

struct Loaded {
  std::vector<double> w;
  std::optional<double> error_variance;  // from ingestion
  Json ingestion;
};

Json paired_json(const PairedEstimate& p) {
  return Json{{"mode", "paired"},           {"rows", p.rows},
              {"mu", p.mu},                 {"sigma", p.sigma},
              {"sigma_u2", p.sigma_u2},     {"error_variance", p.error_variance},
              {"signal_variance", p.signal_variance}, {"nsr", p.nsr}};
}

Json replicate_json(const ReplicateEstimate& r, const IngestOptions& o) {
  return Json{{"mode", "replicate"},
              {"transform", Json{{"shift", o.shift}, {"log", !o.no_log}}},
              {"rows", r.rows},
              {"rejected", r.rejected},
              {"rejected_rows", r.rejected_rows},
              {"within_exam", r.within_exam},
              {"sigma_x", r.sigma_x},
              {"sigma_u", r.sigma_u},
              {"error_variance", r.error_variance},
              {"nsr", r.nsr}};
}

Loaded load_input(const std::string& path, const std::string& column, const IngestOptions& ing) {
  const CsvTable table = read_csv_file(path);
  Loaded out;
  if (ing.mode == "paired") {
    const auto p = harmonize_pairs(table);
    out.w = p.w;
    out.error_variance = p.error_variance;
    out.ingestion = paired_json(p);
    return out;
  }
  if (ing.mode == "replicate") {
    const auto r = replicate_average(table, {ing.shift, !ing.no_log});
    out.w = r.w;
    out.error_variance = r.error_variance;
    out.ingestion = replicate_json(r, ing);
    return out;
  }
  std::size_t idx = 0;
  if (!column.empty()) {
    auto it = std::find(table.header.begin(), table.header.end(), column);
    if (it == table.header.end()) {
      throw Error(ErrorKind::Config, "column '" + column + "' not found in the header");
    }
    idx = static_cast<std::size_t>(it - table.header.begin());
  } else if (table.columns() != 1) {
    throw Error(ErrorKind::Config, "input has " + std::to_string(table.columns()) +
                                       " columns; choose one with --column");
  }
  out.w = table.column(idx);
  return out;
}

struct DeconvolveArgs {
  std::string input;
  std::string column;
  std::string error = "normal";
  std::optional<double> error_var;
  IngestOptions ingest;
  std::string bandwidth = "mise";
  std::string select = "phase";
  int moments = 5;
  double kappa = kDefaultKappa;
  std::string tstar = "auto";
  std::size_t grid_points = 401;
  std::uint64_t seed = 20240601;
  std::size_t threads = 0;
  bool nonparametric = false;
  bool timing = false;
  std::string report = "gssdecon_report.json";
  std::string density = "gssdecon_density.csv";
};

int cmd_deconvolve(const DeconvolveArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  PipelineConfig cfg;
  cfg.moments = a.moments;
  cfg.bandwidth = parse_bandwidth_method(a.bandwidth);
  cfg.selection = parse_selection_criterion(a.select);
  cfg.kappa = a.kappa;
  cfg.seed = a.seed;
  if (a.tstar != "auto") {
    try {
      std::size_t used = 0;
      cfg.tstar = std::stod(a.tstar, &used);
      if (used != a.tstar.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "--tstar must be 'auto' or a positive number");
    }
  }
  if (a.grid_points < 2) throw Error(ErrorKind::Config, "--grid-points must be at least 2");
  cfg.validate();
  const ErrorFamily family = parse_error_family(a.error);

  const Loaded data = load_input(a.input, a.column, a.ingest);
  double variance = 0.0;
  if (data.error_variance) {
    if (a.error_var) {
      throw Error(ErrorKind::Config, "--error-var conflicts with --ingest (variance is estimated)");
    }
    variance = *data.error_variance;
  } else if (a.error_var) {
    variance = *a.error_var;
  } else {
    throw Error(ErrorKind::Config, "--error-var is required unless --ingest is given");
  }
  const ErrorModel error(family, variance);
  const PipelineResult res = run_pipeline(data.w, error, cfg);

  const double xi = res.fit.xi();
  const double omega = res.fit.omega();
  const auto grid = uniform_grid(xi - 5.0 * omega, xi + 5.0 * omega, a.grid_points);
  std::optional<NonparFit> np;
  double np_h = 0.0;
  if (a.nonparametric) {
    np_h = plugin_bandwidth(data.w, error);
    np = np_fit(data.w, error, np_h, grid);
  }
  std::ostringstream csv;
  csv << (np ? "x,f_gss,f_np\n" : "x,f_gss\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv << format_double(grid[i]) << ',' << format_double(res.fit.density(grid[i]));
    if (np) csv << ',' << format_double(np->density[i]);
    csv << '\n';
  }

  Json cfgj;
  cfgj["input"] = a.input;
  cfgj["column"] = a.column;
  cfgj["error"] = Json{{"family", to_string(family)}, {"variance", variance}};
  cfgj["ingest"] = a.ingest.mode.empty() ? Json(nullptr) : data.ingestion;
  cfgj["bandwidth"] = to_string(cfg.bandwidth);
  cfgj["select"] = to_string(cfg.selection);
  cfgj["moments"] = cfg.moments;
  cfgj["kappa"] = cfg.kappa;
  cfgj["tstar"] = cfg.tstar ? Json(*cfg.tstar) : Json("auto");
  cfgj["grid_points"] = a.grid_points;
  cfgj["seed"] = cfg.seed;
  cfgj["threads"] = resolve_threads(a.threads);
  cfgj["nonparametric"] = a.nonparametric;
  cfgj["search"] = Json{{"h_min", cfg.search.h_min},
                        {"h_max", cfg.search.h_max},
                        {"grid_points", cfg.search.grid_points},
                        {"tolerance", cfg.search.tolerance}};
  cfgj["zgrid"] = Json{{"z_max", cfg.zgrid.z_max}, {"points", cfg.zgrid.points}};
  cfgj["gmm"] = Json{{"max_iterations", cfg.gmm.max_iterations},
                     {"size_tolerance", cfg.gmm.size_tolerance},
                     {"dedup_tolerance", cfg.gmm.dedup_tolerance}};

  const double n = static_cast<double>(data.w.size());
  const double mean = std::accumulate(data.w.begin(), data.w.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : data.w) ss += (v - mean) * (v - mean);

  Json report;
  report["command"] = "deconvolve";
  report["config"] = cfgj;
  report["data"] = Json{{"n", data.w.size()}, {"mean", mean}, {"sd", std::sqrt(ss / (n - 1.0))}};
  Json sols = Json::array();
  for (const auto& s : res.solutions) {
    sols.push_back(Json{{"xi", s.xi}, {"omega", s.omega}, {"d", s.d}, {"starts", s.starts}});
  }
  report["gmm_solutions"] = sols;
  Json cands = Json::array();
  for (std::size_t j = 0; j < res.candidates.size(); ++j) {
    const auto& c = res.candidates[j];
    cands.push_back(Json{{"xi", c.solution.xi},
                         {"omega", c.solution.omega},
                         {"d", c.solution.d},
                         {"h", c.bandwidth.h},
                         {"bandwidth_boundary", c.bandwidth.boundary},
                         {"bandwidth_flat", c.bandwidth.flat},
                         {"score", res.selection.scores.at(j)}});
  }
  report["candidates"] = cands;
  report["dropped"] = res.dropped;
  report["selection"] = selection_json(res.selection);
  report["fit"] = Json{{"xi", xi}, {"omega", omega}, {"h", res.fit.h}};
  if (np) report["nonparametric"] = Json{{"h", np_h}, {"truncated", np->truncated}};
  report["density"] = Json{{"file", a.density},
                           {"points", grid.size()},
                           {"lo", grid.front()},
                           {"hi", grid.back()},
                           {"columns", np ? Json{"x", "f_gss", "f_np"} : Json{"x", "f_gss"}}};
  if (a.timing) {
    report["timing_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  OutputSet out;
  out.add(a.density, csv.str());
  out.add(a.report, report.dump(2) + "\n");
  out.commit();
  std::cout << "selected (xi, omega) = (" << xi << ", " << omega << "), h = " << res.fit.h
            << " from " << res.candidates.size() << " candidate(s)\n";
  return kExitOk;
}

struct SimulateArgs {
  std::string config;
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::string summary = "gssdecon_sim.json";
  std::string records = "gssdecon_sim.csv";
};

int cmd_simulate(const SimulateArgs& a) {
  SimConfig cfg = sim_config_from_json(read_text(a.config));
  if (a.replicates) cfg.replicates = *a.replicates;
  if (a.seed) cfg.seed = *a.seed;
  if (a.threads > 0) cfg.threads = a.threads;
  cfg.validate();
  const SimResult res = run_study(cfg);
  OutputSet out;
  out.add(a.records, sim_result_to_csv(res));
  out.add(a.summary, sim_result_to_json(res));
  out.commit();
  for (const auto& c : res.cells) {
    std::cout << c.cell.label() << ": " << c.records.size() - c.failures << " ok, " << c.failures
              << " failed";
    for (const auto& [k, q] : c.ise100) std::cout << "; " << k << " median " << q.median;
    for (const auto& [k, v] : c.rmse) std::cout << "; rmse " << k << " " << v;
    std::cout << '\n';
  }
  return kExitOk;
}

struct IngestArgs {
  std::string input;
  IngestOptions ingest;
  std::string output = "gssdecon_w.csv";
  std::string report = "gssdecon_ingest.json";
};

int cmd_ingest(const IngestArgs& a) {
  if (a.ingest.mode != "paired" && a.ingest.mode != "replicate") {
    throw Error(ErrorKind::Config, "--mode must be paired or replicate");
  }
  const Loaded data = load_input(a.input, "", a.ingest);
  std::ostringstream csv;
  csv << "w\n";
  for (double v : data.w) csv << format_double(v) << '\n';
  Json report;
  report["command"] = "ingest";
  report["input"] = a.input;
  report["output"] = a.output;
  report["estimates"] = data.ingestion;
  OutputSet out;
  out.add(a.output, csv.str());
  out.add(a.report, report.dump(2) + "\n");
  out.commit();
  std::cout << data.w.size() << " rows written; error variance "
            << format_double(*data.error_variance) << '\n';
  return kExitOk;
}

void add_ingest_flags(CLI::App* app, IngestOptions& o) {
  app->add_option("--shift", o.shift, "replicate mode: subtract before the log")
      ->capture_default_str();
  app->add_flag("--no-log", o.no_log, "replicate mode: skip the log transform");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skew-symmetric density deconvolution"};
  app.require_subcommand(1);

  DeconvolveArgs dec;
  auto* d = app.add_subcommand("deconvolve", "fit a GSS deconvolution estimate to data");
  d->add_option("--input", dec.input, "CSV with a header row")->required();
  d->add_option("--column", dec.column, "column name when the CSV has several");
  d->add_option("--error", dec.error, "error family: normal or laplace")->capture_default_str();
  d->add_option("--error-var", dec.error_var, "error variance");
  d->add_option("--ingest", dec.ingest.mode, "preprocess: paired or replicate")
      ->check(CLI::IsMember({"paired", "replicate"}));
  add_ingest_flags(d, dec.ingest);
  d->add_option("--bandwidth", dec.bandwidth, "cv, mise or plugin")->capture_default_str();
  d->add_option("--select", dec.select, "skewness, phase, random or minise")
      ->capture_default_str();
  d->add_option("--moments", dec.moments, "GMM moments M")->capture_default_str();
  d->add_option("--kappa", dec.kappa, "frequency cap of the MISE term")->capture_default_str();
  d->add_option("--tstar", dec.tstar, "phase window, or auto")->capture_default_str();
  d->add_option("--grid-points", dec.grid_points, "density grid size")->capture_default_str();
  d->add_option("--seed", dec.seed, "seed for random selection")->capture_default_str();
  d->add_option("--threads", dec.threads, "worker cap (0: GSSDECON_THREADS or all cores)");
  d->add_flag("--nonparametric", dec.nonparametric, "add the nonparametric estimate column");
  d->add_flag("--timing", dec.timing, "record wall time in the report");
  d->add_option("--report", dec.report, "JSON report path")->capture_default_str();
  d->add_option("--density", dec.density, "density grid CSV path")->capture_default_str();

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "run a simulation study from a JSON config");
  s->add_option("--config", sim.config, "SimConfig JSON")->required();
  s->add_option("--replicates", sim.replicates, "override the replicate count");
  s->add_option("--seed", sim.seed, "override the master seed");
  s->add_option("--threads", sim.threads, "worker cap (0: config, GSSDECON_THREADS, all cores)");
  s->add_option("--summary", sim.summary, "summary JSON path")->capture_default_str();
  s->add_option("--records", sim.records, "per-replicate CSV path")->capture_default_str();

  IngestArgs ing;
  auto* g = app.add_subcommand("ingest", "preprocess paired or replicate measurements");
  g->add_option("--input", ing.input, "CSV with a header row")->required();
  g->add_option("--mode", ing.ingest.mode, "paired or replicate")->required();
  add_ingest_flags(g, ing.ingest);
  g->add_option("--output", ing.output, "CSV of the w series")->capture_default_str();
  g->add_option("--report", ing.report, "JSON estimates path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (d->parsed()) return cmd_deconvolve(dec);
    if (s->parsed()) return cmd_simulate(sim);
    if (g->parsed()) return cmd_ingest(ing);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEstimation;
  }
  return kExitConfig;
}
