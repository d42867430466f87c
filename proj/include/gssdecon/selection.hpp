#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gssdecon/bandwidth.hpp"
#include "gssdecon/distributions.hpp"
#include "gssdecon/estimator.hpp"
#include "gssdecon/fit.hpp"
#include "gssdecon/gmm.hpp"

namespace gssd {

/// Skewness of X recovered from contaminated data:
/// S_W^3 / (S_W^2 - sigma_U^2)^{3/2} * skew(W), with 1/n central moments.
double empirical_skewness_x(std::span<const double> w, double error_variance);

/// Standardized third central moment of the fitted density.
double implied_skewness(const DeconvFit& fit);

SelectionRecord skewness_select(std::span<const DeconvFit> candidates, std::span<const double> w,
                                double error_variance);

inline constexpr std::size_t kPhaseNodes = 201;
inline constexpr int kPhaseWeightExponent = 3;

/// Largest t before |psi_W(t)| first drops below n^{-1/4}, searched on the
/// standardized data with step 0.001 up to 3 and mapped back to the data scale.
double default_tstar(std::span<const double> w);

/// Empirical phase of W cached on 201 uniform nodes of [-t*, t*].
class PhaseReference {
 public:
  /// Shrinks t* (recording a warning) while the empirical phase is undefined
  /// inside the window.
  PhaseReference(std::span<const double> w, double tstar);

  double tstar() const noexcept { return tstar_; }
  const std::vector<double>& nodes() const noexcept { return t_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Weighted integral of |rho_W(t) - rho_fit(t)| with weight (1 - (t/t*)^2)^3.
  double distance(const GssModel& model) const;

 private:
  double tstar_;
  std::vector<double> t_;
  std::vector<double> weight_;
  std::vector<std::complex<double>> phase_;
  std::vector<std::string> warnings_;
};

double phase_distance(const DeconvFit& fit, std::span<const double> w, double tstar);

SelectionRecord phase_select(std::span<const DeconvFit> candidates, std::span<const double> w,
                             std::optional<double> tstar = std::nullopt);

/// Oracle choice by integrated squared error against the truth.
SelectionRecord min_ise_select(std::span<const DeconvFit> candidates, const GssModel& truth);

/// Uniform choice driven by the seed.
SelectionRecord random_select(std::size_t count, std::uint64_t seed);

/// Index of the smallest score, lowest index on ties.
std::size_t argmin_score(std::span<const double> scores);

struct PipelineConfig {
  int moments = 5;
  BandwidthMethod bandwidth = BandwidthMethod::Mise;
  SelectionCriterion selection = SelectionCriterion::Phase;
  double kappa = kDefaultKappa;
  BandwidthSearch search{};
  ZGrid zgrid{};
  std::optional<double> tstar;
  std::uint64_t seed = 20240601;
  GmmOptions gmm{};

  void validate() const;
};

struct CandidateFit {
  GmmSolution solution;
  BandwidthChoice bandwidth;
  DeconvFit fit;
};

struct PipelineResult {
  std::vector<GmmSolution> solutions;  ///< every GMM solution, sorted by D
  std::vector<CandidateFit> candidates;  ///< solutions that produced a fit
  SelectionRecord selection;
  DeconvFit fit;
  std::size_t dropped = 0;  ///< solutions whose fit failed
};

/// Fit one GMM solution: standardize, choose the bandwidth, build the GSS fit.
CandidateFit fit_candidate(std::span<const double> w, const ErrorModel& error,
                           const GmmSolution& solution, const PipelineConfig& config);

/// GMM, per-solution bandwidth and fit, then selection. MinIse needs `truth`.
PipelineResult run_pipeline(std::span<const double> w, const ErrorModel& error,
                            const PipelineConfig& config = {},
                            const GssModel* truth = nullptr);

/// Selection over already fitted candidates.
SelectionRecord select_candidate(std::span<const DeconvFit> fits, std::span<const double> w,
                                 const ErrorModel& error, const PipelineConfig& config,
                                 const GssModel* truth = nullptr);

}  // namespace gssd
