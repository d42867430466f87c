#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gssdecon/distributions.hpp"
#include "gssdecon/gss.hpp"
#include "gssdecon/spectral.hpp"

namespace gssd {

struct BandwidthSearch {
  double h_min = 0.02;
  double h_max = 3.0;
  std::size_t grid_points = 40;  ///< log-spaced
  double tolerance = 1e-8;       ///< relative tolerance of the Brent refinement

  void validate() const;
  std::vector<double> grid() const;
};

struct BandwidthChoice {
  double h = 0.0;
  double value = 0.0;     ///< objective at h
  bool boundary = false;  ///< best grid point was an end of the range
  bool flat = false;      ///< objective constant over the grid
};

/// Coarse log-grid scan followed by Brent refinement between the neighbours
/// of the best grid point. Non-finite objective values rank last.
BandwidthChoice minimize_bandwidth(const std::function<double(double)>& objective,
                                   const BandwidthSearch& search = {});

/// Psi-U floor below which frequency-domain objectives are treated as
/// undefined; squares of the cf must stay representable.
inline constexpr double kObjectiveCfFloor = 1e-150;

/// Cross-validation score at bandwidth h.
double cv_score(double h, std::span<const double> wstar, const ErrorModel& error, double omega);

/// Approximate MISE at bandwidth h (kappa truncates the s0^2 estimate).
double mise_approx(double h, std::span<const double> wstar, const ErrorModel& error, double omega,
                   double kappa = kDefaultKappa);

/// Both data-driven objectives from one cached spectrum, so a bandwidth
/// search costs O(grid) per evaluation. Bandwidths needing frequencies past
/// the cached range (or where the error cf underflows) score +infinity.
class SpectralObjectives {
 public:
  SpectralObjectives(std::span<const double> wstar, const ErrorModel& error, double omega,
                     double h_min, double kappa = kDefaultKappa, bool with_mise = true);

  double cv(double h) const;
  double mise(double h) const;
  double min_bandwidth() const noexcept { return 1.0 / t_.back(); }

 private:
  std::vector<double> t_;
  double dt_;
  std::vector<double> sq_mean_;    ///< (S/n)^2 / psi^2
  std::vector<double> cross_;      ///< (S^2 - Q) / (n(n-1) psi^2)
  std::vector<double> variance_;   ///< (1 - psi_U(2t/omega) c0(2t)) / (2 n psi^2)
  std::vector<double> s2_t_;
  std::vector<double> s2_;         ///< unclipped U-statistic estimate of s0^2
  double n_;
  double kappa_;
};

/// Exact MISE of the GSS estimator for a known truth, on the x scale:
/// (2 pi omega)^-1 * integral of the variance and squared-bias terms of s0_hat.
/// The truth's s0 is tabulated once.
class TruthSpectrum {
 public:
  TruthSpectrum(const GssModel& truth, const ErrorModel& error);

  double mise(double h, std::size_t n) const;
  /// s0 of the standardized truth at t >= 0 (linear interpolation of the table).
  double s0(double t) const;
  double t_max() const noexcept { return t_max_; }

 private:
  double omega_;
  ErrorModel error_;
  double dt_;
  double t_max_;
  std::vector<double> s0_;
  std::vector<double> tail_;  ///< integral of s0^2 from t_k to t_max
};

double mise_exact(double h, const GssModel& truth, const ErrorModel& error, std::size_t n);

struct PluginResult {
  double h = 0.0;
  bool converged = true;  ///< false: normal-reference fallback was used
};

/// Two-stage plug-in bandwidth for deconvolution. Computed on standardized
/// data and rescaled, so it is exactly scale equivariant.
PluginResult plugin_bandwidth_detail(std::span<const double> w, const ErrorModel& error);
double plugin_bandwidth(std::span<const double> w, const ErrorModel& error);

enum class BandwidthMethod { Cv, Mise, Plugin };

const char* to_string(BandwidthMethod method) noexcept;
BandwidthMethod parse_bandwidth_method(const std::string& name);

/// Bandwidth for the GSS estimator on W* = (W - xi)/omega.
BandwidthChoice select_bandwidth(BandwidthMethod method, std::span<const double> wstar,
                                 const ErrorModel& error, double omega,
                                 const BandwidthSearch& search = {},
                                 double kappa = kDefaultKappa);

}  // namespace gssd
