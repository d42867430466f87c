#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gssdecon/distributions.hpp"
#include "gssdecon/fit.hpp"
#include "gssdecon/gss.hpp"
#include "gssdecon/spectral.hpp"

namespace gssd {

/// Uniform grid on [0, z_max] on which the skewing function is tabulated;
/// negative arguments follow by reflection.
struct ZGrid {
  double z_max = 6.0;
  std::size_t points = 401;

  double z(std::size_t i) const noexcept {
    return z_max * static_cast<double>(i) / static_cast<double>(points - 1);
  }
};

/// Raw skewing-function estimate 1/2 + (4 pi f0(z))^-1 * integral of
/// sin(tz) s0_hat(t) over [-1/h, 1/h]. Not range-respecting.
double skew_hat(double z, std::span<const double> wstar, const ErrorModel& error, double omega,
                double h);
/// skew_hat clipped into [0, 1], evaluated at |z| and reflected.
double skew_corrected(double z, std::span<const double> wstar, const ErrorModel& error,
                      double omega, double h);
inline double clip_skew(double pi_hat) noexcept {
  return pi_hat < 0.0 ? 0.0 : (pi_hat > 1.0 ? 1.0 : pi_hat);
}

/// Reusable estimator for one standardized sample W* = (W - xi)/omega.
/// Precomputes the empirical sine sums up to `t_limit`, so evaluating many
/// bandwidths costs O(grid) each.
class SkewEstimator {
 public:
  SkewEstimator(std::span<const double> w, double xi, double omega, const ErrorModel& error,
                double t_limit, ZGrid zgrid = {});

  double xi() const noexcept { return xi_; }
  double omega() const noexcept { return omega_; }
  const ZGrid& zgrid() const noexcept { return zgrid_; }
  const EmpiricalSpectrum& spectrum() const noexcept { return spectrum_; }
  const std::vector<double>& wstar() const noexcept { return wstar_; }
  const ErrorModel& error() const noexcept { return error_; }
  /// Smallest bandwidth the cached spectrum supports.
  double min_bandwidth() const noexcept { return 1.0 / spectrum_.t_max(); }

  /// s0_hat on the spectrum grid (entry k at t = k dt), zero beyond 1/h.
  std::vector<double> s0_on_grid(double h) const;
  /// Unclipped skew_hat on the z-grid.
  std::vector<double> raw_table(double h) const;
  DeconvFit fit(double h) const;

 private:
  double xi_;
  double omega_;
  ErrorModel error_;
  ZGrid zgrid_;
  std::vector<double> wstar_;
  EmpiricalSpectrum spectrum_;
};

/// Full GSS fit at bandwidth h and parameters (xi, omega).
DeconvFit gss_fit(std::span<const double> w, double xi, double omega, const ErrorModel& error,
                  double h, ZGrid zgrid = {});

/// Uniform x-grid of `points` nodes on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

/// Reusable nonparametric deconvolution estimator on a fixed x-grid.
class NonparEstimator {
 public:
  NonparEstimator(std::span<const double> w, const ErrorModel& error, std::vector<double> xgrid,
                  double t_limit);

  double min_bandwidth() const noexcept { return 1.0 / spectrum_.t_max(); }
  /// Untruncated estimate on the grid.
  std::vector<double> raw(double h) const;
  NonparFit fit(double h) const;

 private:
  ErrorModel error_;
  std::vector<double> xgrid_;
  double centre_;
  EmpiricalSpectrum spectrum_;
};

NonparFit np_fit(std::span<const double> w, const ErrorModel& error, double h,
                 std::vector<double> xgrid);

/// Default grid for np_fit: data range widened by three standard deviations.
std::vector<double> default_xgrid(std::span<const double> w, std::size_t points = 401);

/// Integrated squared error of a density against the truth on a cached grid.
class IseGrid {
 public:
  IseGrid(const GssModel& truth, double lo, double hi, std::size_t points = 2001);

  double operator()(const std::function<double(double)>& density) const;
  double operator()(const DeconvFit& fit) const;
  double operator()(const NonparFit& fit) const;

  double lo() const noexcept { return x_.front(); }
  double hi() const noexcept { return x_.back(); }

 private:
  std::vector<double> x_;
  std::vector<double> truth_;
  double dx_;
};

/// ISE over a grid covering both the fit and the truth (xi +- 8 omega each).
double ise(const DeconvFit& fit, const GssModel& truth);
double ise(const NonparFit& fit, const GssModel& truth);
/// ISE of tabulated density values on an arbitrary sorted grid; the truth's
/// mass outside the grid is added in.
double ise(std::span<const double> x, std::span<const double> density, const GssModel& truth);

}  // namespace gssd
