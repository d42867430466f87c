#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gssdecon/bandwidth.hpp"
#include "gssdecon/distributions.hpp"
#include "gssdecon/estimator.hpp"
#include "gssdecon/fit.hpp"
#include "gssdecon/gmm.hpp"
#include "gssdecon/gss.hpp"

namespace gssd {

/// Simulation truths: normal (pi0), sharp probit (pi1), cubic probit (pi2),
/// all with xi = 0, omega = 1.
enum class TruthKind { Pi0, Pi1, Pi2 };

const char* to_string(TruthKind kind) noexcept;
TruthKind parse_truth_kind(const std::string& name);
GssModel truth_model(TruthKind kind);

/// One simulation configuration.
struct SimCell {
  TruthKind truth = TruthKind::Pi1;
  ErrorFamily family = ErrorFamily::Normal;
  double nsr = 0.2;  ///< sigma_U^2 / sigma_X^2, zero allowed
  std::size_t n = 200;

  /// Error law with variance nsr times the exact model variance.
  ErrorModel error() const;
  /// e.g. "pi1_n200_N0.2"
  std::string label() const;
};

/// Contaminated sample of replicate `replicate`; depends only on the cell,
/// the master seed and the replicate index.
std::vector<double> simulate_replicate(const SimCell& cell, std::uint64_t master_seed,
                                       std::size_t replicate);
std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t replicate) noexcept;

enum class StudyKind { Table1, Table2, Selection };

const char* to_string(StudyKind kind) noexcept;
StudyKind parse_study_kind(const std::string& name);

struct SimConfig {
  StudyKind study = StudyKind::Selection;
  std::vector<SimCell> cells;
  std::size_t replicates = 200;
  std::uint64_t seed = 20240601;
  std::vector<int> table1_moments{2, 5};
  int moments = 5;  ///< GMM order for the oracle and selection studies
  std::vector<BandwidthMethod> bandwidths{BandwidthMethod::Mise};
  std::vector<SelectionCriterion> selections{SelectionCriterion::MinIse,
                                             SelectionCriterion::Skewness,
                                             SelectionCriterion::Phase,
                                             SelectionCriterion::Random};
  bool nonparametric = true;  ///< add the NP reference column
  double kappa = kDefaultKappa;
  BandwidthSearch search{};
  ZGrid zgrid{};
  std::optional<double> tstar;
  GmmOptions gmm{};
  std::size_t threads = 0;  ///< 0: GSSDECON_THREADS, else hardware concurrency

  void validate() const;
};

/// One replicate. `values` holds the named outputs of the study, e.g.
/// "xi_M2", "ise100_gss", "ise100_mise_phase", "h_np".
struct ReplicateRecord {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  std::size_t solutions = 0;
  std::map<std::string, double> values;
};

struct Quantiles {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Type-7 (linear interpolation) quantile of unsorted data.
double quantile(std::span<const double> data, double p);
/// Median and quartiles; throws on empty input.
Quantiles summarize(std::span<const double> data);
double rmse(std::span<const double> estimates, double truth);

struct CellResult {
  SimCell cell;
  std::vector<ReplicateRecord> records;  ///< one per replicate, in index order
  std::size_t failures = 0;
  std::map<std::string, Quantiles> ise100;  ///< keyed by estimator column
  std::map<std::string, double> rmse;       ///< keyed by "xi_M2", "omega_M5", ...
};

struct SimResult {
  SimConfig config;
  std::vector<CellResult> cells;
};

/// Runs fn(0..count-1) on up to `threads` workers; the first exception is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);
std::size_t resolve_threads(std::size_t requested);

/// GMM-accuracy replicate: for each M, the GMM solution closest to (0, 1).
ReplicateRecord table1_replicate(const SimCell& cell, const SimConfig& config,
                                 std::size_t replicate);
/// Oracle replicate: ISE-minimizing bandwidth for GSS (best solution) and NP.
ReplicateRecord table2_replicate(const SimCell& cell, const SimConfig& config,
                                 std::size_t replicate);
/// Selection replicate: every bandwidth method and selection rule, plus the
/// NP plug-in reference.
ReplicateRecord selection_replicate(const SimCell& cell, const SimConfig& config,
                                    std::size_t replicate);

/// Summaries over the successful records of one cell.
CellResult summarize_cell(const SimCell& cell, std::vector<ReplicateRecord> records);

SimResult run_study(const SimConfig& config);
SimResult run_table1(SimConfig config);
SimResult run_table2(SimConfig config);
SimResult run_selection_tables(SimConfig config);

/// Smallest true ISE over h of the GSS fit at (xi, omega); returns {h, ISE}.
std::pair<double, double> oracle_gss(std::span<const double> w, const ErrorModel& error,
                                     double xi, double omega, const GssModel& truth,
                                     const BandwidthSearch& search, ZGrid zgrid = {});
/// Same for the nonparametric estimator on default_xgrid(w).
std::pair<double, double> oracle_np(std::span<const double> w, const ErrorModel& error,
                                    const GssModel& truth, const BandwidthSearch& search);

std::string sim_config_to_json(const SimConfig& config);
/// Missing keys take defaults; throws Config on invalid content, Parse on bad JSON.
SimConfig sim_config_from_json(const std::string& text);
std::string sim_result_to_json(const SimResult& result);
/// One row per replicate and cell; columns are the union of value names.
std::string sim_result_to_csv(const SimResult& result);

}  // namespace gssd
