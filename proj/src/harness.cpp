#include "gssdecon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gssdecon/errors.hpp"
#include "gssdecon/rng.hpp"
#include "gssdecon/selection.hpp"

namespace gssd {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kTruthXi = 0.0;
constexpr double kTruthOmega = 1.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string column_name(BandwidthMethod b, SelectionCriterion s) {
  return std::string(to_string(b)) + "_" + to_string(s);
}

// Largest frequency the GSS estimator may use on W* for this error.
double gss_t_limit(const ErrorModel& error, double omega, const BandwidthSearch& search) {
  const double usable = degenerate_frequency(error, omega, kObjectiveCfFloor);
  return std::min(1.0 / search.h_min, usable * (1.0 - 1e-9));
}

}  // namespace

const char* to_string(TruthKind kind) noexcept {
  switch (kind) {
    case TruthKind::Pi0:
      return "pi0";
    case TruthKind::Pi1:
      return "pi1";
    case TruthKind::Pi2:
      return "pi2";
  }
  return "pi0";
}

TruthKind parse_truth_kind(const std::string& name) {
  if (name == "pi0") return TruthKind::Pi0;
  if (name == "pi1") return TruthKind::Pi1;
  if (name == "pi2") return TruthKind::Pi2;
  throw Error(ErrorKind::Config, "unknown truth '" + name + "' (expected pi0, pi1 or pi2)");
}

GssModel truth_model(TruthKind kind) {
  switch (kind) {
    case TruthKind::Pi0:
      return GssModel(SkewingFunction::constant_half(), kTruthXi, kTruthOmega);
    case TruthKind::Pi1:
      return GssModel(SkewingFunction::probit_scaled(kSharpProbitSlope), kTruthXi, kTruthOmega);
    case TruthKind::Pi2:
      return GssModel(SkewingFunction::probit_cubic(), kTruthXi, kTruthOmega);
  }
  throw Error(ErrorKind::Config, "unknown truth");
}

ErrorModel SimCell::error() const {
  return ErrorModel(family, nsr * model_variance(truth_model(truth)));
}

std::string SimCell::label() const {
  std::ostringstream os;
  os << to_string(truth) << "_n" << n << "_" << (family == ErrorFamily::Normal ? "N" : "L") << nsr;
  return os.str();
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t replicate) noexcept {
  return split_seed(master_seed, replicate);
}

std::vector<double> simulate_replicate(const SimCell& cell, std::uint64_t master_seed,
                                       std::size_t replicate) {
  const std::uint64_t seed = replicate_seed(master_seed, replicate);
  std::vector<double> w = gss_sample(cell.n, truth_model(cell.truth), split_seed(seed, 1));
  const ErrorModel error = cell.error();
  if (error.variance() > 0.0) {
    Rng rng(split_seed(seed, 2));
    for (auto& x : w) x += error.sample(rng);
  }
  return w;
}

const char* to_string(StudyKind kind) noexcept {
  switch (kind) {
    case StudyKind::Table1:
      return "table1";
    case StudyKind::Table2:
      return "table2";
    case StudyKind::Selection:
      return "selection";
  }
  return "selection";
}

StudyKind parse_study_kind(const std::string& name) {
  if (name == "table1") return StudyKind::Table1;
  if (name == "table2") return StudyKind::Table2;
  if (name == "selection") return StudyKind::Selection;
  throw Error(ErrorKind::Config,
              "unknown study '" + name + "' (expected table1, table2 or selection)");
}

void SimConfig::validate() const {
  if (cells.empty()) throw Error(ErrorKind::Config, "simulation needs at least one cell");
  for (const auto& c : cells) {
    if (!(c.nsr >= 0.0) || !std::isfinite(c.nsr)) {
      throw Error(ErrorKind::Config, "NSR must be finite and >= 0");
    }
    if (c.n < 10) throw Error(ErrorKind::Config, "sample size must be at least 10");
  }
  if (replicates < 1) throw Error(ErrorKind::Config, "replicates must be at least 1");
  if (table1_moments.empty()) throw Error(ErrorKind::Config, "table1 needs at least one M");
  for (int m : table1_moments) {
    if (m < 2 || m > 5) throw Error(ErrorKind::Config, "moments must lie in [2, 5]");
  }
  if (study == StudyKind::Selection) {
    if (bandwidths.empty()) throw Error(ErrorKind::Config, "no bandwidth methods given");
    if (selections.empty()) throw Error(ErrorKind::Config, "no selection rules given");
  }
  PipelineConfig p;
  p.moments = moments;
  p.kappa = kappa;
  p.search = search;
  p.zgrid = zgrid;
  p.tstar = tstar;
  p.gmm = gmm;
  p.validate();
}

double quantile(std::span<const double> data, double p) {
  if (data.empty()) throw Error(ErrorKind::InsufficientData, "quantile of empty data");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Domain, "quantile level must lie in [0, 1]");
  std::vector<double> s(data.begin(), data.end());
  std::sort(s.begin(), s.end());
  const double pos = p * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= s.size()) return s.back();
  const double frac = pos - static_cast<double>(i);
  return s[i] + frac * (s[i + 1] - s[i]);
}

Quantiles summarize(std::span<const double> data) {
  if (data.empty()) throw Error(ErrorKind::InsufficientData, "no records to summarize");
  return {quantile(data, 0.5), quantile(data, 0.25), quantile(data, 0.75)};
}

double rmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw Error(ErrorKind::InsufficientData, "no estimates");
  double ss = 0.0;
  for (double e : estimates) ss += (e - truth) * (e - truth);
  return std::sqrt(ss / static_cast<double>(estimates.size()));
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GSSDECON_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first;
  std::mutex mutex;
  auto work = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!first) first = std::current_exception();
        stop.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::pair<double, double> oracle_gss(std::span<const double> w, const ErrorModel& error,
                                     double xi, double omega, const GssModel& truth,
                                     const BandwidthSearch& search, ZGrid zgrid) {
  const SkewEstimator est(w, xi, omega, error, gss_t_limit(error, omega, search), zgrid);
  const double h_floor = est.min_bandwidth() * (1.0 - 1e-12);
  auto objective = [&](double h) {
    if (h < h_floor) return kInf;
    try {
      return ise(est.fit(h), truth);
    } catch (const Error&) {
      return kInf;
    }
  };
  const BandwidthChoice c = minimize_bandwidth(objective, search);
  if (!std::isfinite(c.value)) {
    throw Error(ErrorKind::EstimationFailure, "no bandwidth gives a finite ISE");
  }
  return {c.h, c.value};
}

std::pair<double, double> oracle_np(std::span<const double> w, const ErrorModel& error,
                                    const GssModel& truth, const BandwidthSearch& search) {
  const double usable = degenerate_frequency(error, 1.0, kObjectiveCfFloor);
  const NonparEstimator est(w, error, default_xgrid(w),
                            std::min(1.0 / search.h_min, usable * (1.0 - 1e-9)));
  const double h_floor = est.min_bandwidth() * (1.0 - 1e-12);
  auto objective = [&](double h) {
    if (h < h_floor) return kInf;
    try {
      return ise(est.fit(h), truth);
    } catch (const Error&) {
      return kInf;
    }
  };
  const BandwidthChoice c = minimize_bandwidth(objective, search);
  if (!std::isfinite(c.value)) {
    throw Error(ErrorKind::EstimationFailure, "no bandwidth gives a finite ISE");
  }
  return {c.h, c.value};
}

namespace {

template <typename Body>
ReplicateRecord guarded(const SimConfig& config, std::size_t replicate, Body body) {
  ReplicateRecord rec;
  rec.replicate = replicate;
  rec.seed = replicate_seed(config.seed, replicate);
  try {
    body(rec);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    rec.failed = true;
    rec.failure = e.what();
    rec.values.clear();
  }
  return rec;
}

PipelineConfig pipeline_config(const SimConfig& config, std::uint64_t seed) {
  PipelineConfig p;
  p.moments = config.moments;
  p.kappa = config.kappa;
  p.search = config.search;
  p.zgrid = config.zgrid;
  p.tstar = config.tstar;
  p.gmm = config.gmm;
  p.seed = seed;
  return p;
}

}  // namespace

ReplicateRecord table1_replicate(const SimCell& cell, const SimConfig& config,
                                 std::size_t replicate) {
  return guarded(config, replicate, [&](ReplicateRecord& rec) {
    const auto w = simulate_replicate(cell, config.seed, replicate);
    const ErrorModel error = cell.error();
    for (int m : config.table1_moments) {
      const auto sols = gmm_solve(w, MomentSpec(m, error), config.gmm);
      std::size_t best = 0;
      double best_d = kInf;
      for (std::size_t j = 0; j < sols.size(); ++j) {
        const double d = std::hypot(sols[j].xi - kTruthXi, sols[j].omega - kTruthOmega);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      const std::string tag = "_M" + std::to_string(m);
      rec.values["xi" + tag] = sols[best].xi;
      rec.values["omega" + tag] = sols[best].omega;
      rec.values["solutions" + tag] = static_cast<double>(sols.size());
      rec.solutions = std::max(rec.solutions, sols.size());
    }
  });
}

ReplicateRecord table2_replicate(const SimCell& cell, const SimConfig& config,
                                 std::size_t replicate) {
  return guarded(config, replicate, [&](ReplicateRecord& rec) {
    const auto w = simulate_replicate(cell, config.seed, replicate);
    const ErrorModel error = cell.error();
    const GssModel truth = truth_model(cell.truth);
    const auto sols = gmm_solve(w, MomentSpec(config.moments, error), config.gmm);
    rec.solutions = sols.size();
    double best_ise = kInf;
    for (const auto& s : sols) {
      try {
        const auto [h, v] = oracle_gss(w, error, s.xi, s.omega, truth, config.search, config.zgrid);
        if (v < best_ise) {
          best_ise = v;
          rec.values["h_gss"] = h;
          rec.values["xi_gss"] = s.xi;
          rec.values["omega_gss"] = s.omega;
        }
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
      }
    }
    if (!std::isfinite(best_ise)) {
      throw Error(ErrorKind::EstimationFailure, "no GMM solution gives a finite ISE");
    }
    rec.values["ise100_gss"] = 100.0 * best_ise;
    if (config.nonparametric) {
      const auto [h, v] = oracle_np(w, error, truth, config.search);
      rec.values["h_np"] = h;
      rec.values["ise100_np"] = 100.0 * v;
    }
  });
}

ReplicateRecord selection_replicate(const SimCell& cell, const SimConfig& config,
                                    std::size_t replicate) {
  return guarded(config, replicate, [&](ReplicateRecord& rec) {
    const auto w = simulate_replicate(cell, config.seed, replicate);
    const ErrorModel error = cell.error();
    const GssModel truth = truth_model(cell.truth);
    const auto sols = gmm_solve(w, MomentSpec(config.moments, error), config.gmm);
    rec.solutions = sols.size();
    for (BandwidthMethod b : config.bandwidths) {
      PipelineConfig p = pipeline_config(config, split_seed(rec.seed, 3));
      p.bandwidth = b;
      std::vector<CandidateFit> cands;
      for (const auto& s : sols) {
        try {
          cands.push_back(fit_candidate(w, error, s, p));
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::Config) throw;
        }
      }
      if (cands.empty()) {
        throw Error(ErrorKind::EstimationFailure,
                    std::string("no candidate fit with ") + to_string(b) + " bandwidth");
      }
      std::vector<DeconvFit> fits;
      std::vector<double> ises;
      for (const auto& c : cands) {
        fits.push_back(c.fit);
        ises.push_back(ise(c.fit, truth));
      }
      for (SelectionCriterion s : config.selections) {
        std::size_t chosen = 0;
        if (fits.size() > 1) {
          if (s == SelectionCriterion::MinIse) {
            chosen = argmin_score(ises);
          } else {
            p.selection = s;
            chosen = select_candidate(fits, w, error, p, &truth).chosen;
          }
        }
        const std::string col = column_name(b, s);
        rec.values["ise100_" + col] = 100.0 * ises[chosen];
        rec.values["h_" + col] = fits[chosen].h;
        rec.values["chosen_" + col] = static_cast<double>(chosen);
      }
    }
    if (config.nonparametric) {
      const double h = plugin_bandwidth(w, error);
      const NonparFit np = np_fit(w, error, h, default_xgrid(w));
      rec.values["h_np"] = h;
      rec.values["ise100_np"] = 100.0 * ise(np, truth);
    }
  });
}

CellResult summarize_cell(const SimCell& cell, std::vector<ReplicateRecord> records) {
  CellResult out;
  out.cell = cell;
  out.records = std::move(records);
  std::map<std::string, std::vector<double>> columns;
  for (const auto& r : out.records) {
    if (r.failed) {
      ++out.failures;
      continue;
    }
    for (const auto& [k, v] : r.values) columns[k].push_back(v);
  }
  for (const auto& [k, v] : columns) {
    if (k.rfind("ise100_", 0) == 0) {
      out.ise100[k.substr(7)] = summarize(v);
    } else if (k.rfind("xi_M", 0) == 0) {
      out.rmse[k] = rmse(v, kTruthXi);
    } else if (k.rfind("omega_M", 0) == 0) {
      out.rmse[k] = rmse(v, kTruthOmega);
    }
  }
  return out;
}

SimResult run_study(const SimConfig& config) {
  config.validate();
  SimResult result;
  result.config = config;
  result.config.threads = resolve_threads(config.threads);
  for (const auto& cell : config.cells) {
    std::vector<ReplicateRecord> records(config.replicates);
    parallel_for(config.replicates, result.config.threads, [&](std::size_t i) {
      switch (config.study) {
        case StudyKind::Table1:
          records[i] = table1_replicate(cell, config, i);
          break;
        case StudyKind::Table2:
          records[i] = table2_replicate(cell, config, i);
          break;
        case StudyKind::Selection:
          records[i] = selection_replicate(cell, config, i);
          break;
      }
    });
    result.cells.push_back(summarize_cell(cell, std::move(records)));
  }
  return result;
}

SimResult run_table1(SimConfig config) {
  config.study = StudyKind::Table1;
  return run_study(config);
}

SimResult run_table2(SimConfig config) {
  config.study = StudyKind::Table2;
  return run_study(config);
}

SimResult run_selection_tables(SimConfig config) {
  config.study = StudyKind::Selection;
  return run_study(config);
}

// ---------------------------------------------------------------------------
// JSON / CSV

namespace {

Json cell_to_json(const SimCell& c) {
  return Json{{"truth", to_string(c.truth)},
              {"error", to_string(c.family)},
              {"nsr", c.nsr},
              {"n", c.n}};
}

Json config_to_json(const SimConfig& c) {
  Json j;
  j["study"] = to_string(c.study);
  j["cells"] = Json::array();
  for (const auto& cell : c.cells) j["cells"].push_back(cell_to_json(cell));
  j["replicates"] = c.replicates;
  j["seed"] = c.seed;
  j["table1_moments"] = c.table1_moments;
  j["moments"] = c.moments;
  j["bandwidths"] = Json::array();
  for (auto b : c.bandwidths) j["bandwidths"].push_back(to_string(b));
  j["selections"] = Json::array();
  for (auto s : c.selections) j["selections"].push_back(to_string(s));
  j["nonparametric"] = c.nonparametric;
  j["kappa"] = c.kappa;
  j["search"] = Json{{"h_min", c.search.h_min},
                     {"h_max", c.search.h_max},
                     {"grid_points", c.search.grid_points},
                     {"tolerance", c.search.tolerance}};
  j["zgrid"] = Json{{"z_max", c.zgrid.z_max}, {"points", c.zgrid.points}};
  j["tstar"] = c.tstar ? Json(*c.tstar) : Json(nullptr);
  j["gmm"] = Json{{"max_iterations", c.gmm.max_iterations},
                  {"size_tolerance", c.gmm.size_tolerance},
                  {"dedup_tolerance", c.gmm.dedup_tolerance}};
  j["threads"] = c.threads;
  return j;
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw Error(ErrorKind::Config, std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) {
      throw Error(ErrorKind::Config, "unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Config, std::string("invalid value for '") + key + "'");
  }
}

// Cartesian product of the grid-form keys.
std::vector<SimCell> cells_from_grid(const Json& j) {
  std::vector<std::string> truths{"pi1"}, errors{"normal"};
  std::vector<double> nsrs{0.2};
  std::vector<std::size_t> ns{200};
  read(j, "truths", truths);
  read(j, "errors", errors);
  read(j, "nsrs", nsrs);
  read(j, "ns", ns);
  std::vector<SimCell> out;
  for (const auto& t : truths)
    for (const auto& e : errors)
      for (double r : nsrs)
        for (std::size_t n : ns) out.push_back({parse_truth_kind(t), parse_error_family(e), r, n});
  return out;
}

}  // namespace

std::string sim_config_to_json(const SimConfig& config) { return config_to_json(config).dump(2); }

SimConfig sim_config_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("invalid JSON: ") + e.what());
  }
  check_keys(j,
             {"study", "cells", "truths", "errors", "nsrs", "ns", "replicates", "seed",
              "table1_moments", "moments", "bandwidths", "selections", "nonparametric", "kappa",
              "search", "zgrid", "tstar", "gmm", "threads"},
             "simulation config");
  SimConfig c;
  std::string study = to_string(c.study);
  read(j, "study", study);
  c.study = parse_study_kind(study);
  if (j.contains("cells")) {
    if (j.contains("truths") || j.contains("errors") || j.contains("nsrs") || j.contains("ns")) {
      throw Error(ErrorKind::Config, "give either 'cells' or the truths/errors/nsrs/ns grid");
    }
    if (!j["cells"].is_array()) throw Error(ErrorKind::Config, "'cells' must be an array");
    for (const auto& cj : j["cells"]) {
      check_keys(cj, {"truth", "error", "nsr", "n"}, "cell");
      std::string truth = "pi1", error = "normal";
      SimCell cell;
      read(cj, "truth", truth);
      read(cj, "error", error);
      read(cj, "nsr", cell.nsr);
      read(cj, "n", cell.n);
      cell.truth = parse_truth_kind(truth);
      cell.family = parse_error_family(error);
      c.cells.push_back(cell);
    }
  } else {
    c.cells = cells_from_grid(j);
  }
  read(j, "replicates", c.replicates);
  read(j, "seed", c.seed);
  read(j, "table1_moments", c.table1_moments);
  read(j, "moments", c.moments);
  if (j.contains("bandwidths")) {
    std::vector<std::string> names;
    read(j, "bandwidths", names);
    c.bandwidths.clear();
    for (const auto& s : names) c.bandwidths.push_back(parse_bandwidth_method(s));
  }
  if (j.contains("selections")) {
    std::vector<std::string> names;
    read(j, "selections", names);
    c.selections.clear();
    for (const auto& s : names) c.selections.push_back(parse_selection_criterion(s));
  }
  read(j, "nonparametric", c.nonparametric);
  read(j, "kappa", c.kappa);
  if (j.contains("search")) {
    const Json& s = j["search"];
    check_keys(s, {"h_min", "h_max", "grid_points", "tolerance"}, "search");
    read(s, "h_min", c.search.h_min);
    read(s, "h_max", c.search.h_max);
    read(s, "grid_points", c.search.grid_points);
    read(s, "tolerance", c.search.tolerance);
  }
  if (j.contains("zgrid")) {
    const Json& z = j["zgrid"];
    check_keys(z, {"z_max", "points"}, "zgrid");
    read(z, "z_max", c.zgrid.z_max);
    read(z, "points", c.zgrid.points);
  }
  if (j.contains("tstar") && !j["tstar"].is_null()) {
    double t = 0.0;
    read(j, "tstar", t);
    c.tstar = t;
  }
  if (j.contains("gmm")) {
    const Json& g = j["gmm"];
    check_keys(g, {"max_iterations", "size_tolerance", "dedup_tolerance"}, "gmm");
    read(g, "max_iterations", c.gmm.max_iterations);
    read(g, "size_tolerance", c.gmm.size_tolerance);
    read(g, "dedup_tolerance", c.gmm.dedup_tolerance);
  }
  read(j, "threads", c.threads);
  c.validate();
  return c;
}

std::string sim_result_to_json(const SimResult& result) {
  Json j;
  j["config"] = config_to_json(result.config);
  j["cells"] = Json::array();
  for (const auto& cr : result.cells) {
    Json cj;
    cj["label"] = cr.cell.label();
    cj["cell"] = cell_to_json(cr.cell);
    cj["error_variance"] = cr.cell.error().variance();
    cj["replicates"] = cr.records.size();
    cj["failures"] = cr.failures;
    Json ise = Json::object();
    for (const auto& [k, q] : cr.ise100) {
      ise[k] = Json{{"median", q.median}, {"q1", q.q1}, {"q3", q.q3}};
    }
    cj["ise100"] = ise;
    Json rm = Json::object();
    for (const auto& [k, v] : cr.rmse) rm[k] = v;
    cj["rmse"] = rm;
    Json failed = Json::array();
    for (const auto& r : cr.records) {
      if (r.failed) failed.push_back(Json{{"replicate", r.replicate}, {"message", r.failure}});
    }
    cj["failed_replicates"] = failed;
    j["cells"].push_back(cj);
  }
  return j.dump(2) + "\n";
}

std::string sim_result_to_csv(const SimResult& result) {
  std::set<std::string> keys;
  for (const auto& cr : result.cells)
    for (const auto& r : cr.records)
      for (const auto& kv : r.values) keys.insert(kv.first);
  std::ostringstream os;
  os << "cell,truth,error,nsr,n,replicate,seed,failed,solutions";
  for (const auto& k : keys) os << ',' << k;
  os << '\n';
  for (const auto& cr : result.cells) {
    for (const auto& r : cr.records) {
      os << cr.cell.label() << ',' << to_string(cr.cell.truth) << ','
         << to_string(cr.cell.family) << ',' << format_double(cr.cell.nsr) << ',' << cr.cell.n
         << ',' << r.replicate << ',' << r.seed << ',' << (r.failed ? 1 : 0) << ','
         << r.solutions;
      for (const auto& k : keys) {
        const auto it = r.values.find(k);
        os << ',' << (it == r.values.end() ? std::string() : format_double(it->second));
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace gssd
