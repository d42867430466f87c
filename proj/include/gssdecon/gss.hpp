#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gssdecon/distributions.hpp"

namespace gssd {

/// Slope of the sharply skewed probit skewing function used in the
/// simulation study.
inline constexpr double kSharpProbitSlope = 9.9625;

enum class SkewKind { ConstantHalf, ProbitScaled, ProbitCubic, Tabulated };

/// A skewing function pi with 0 <= pi(z) = 1 - pi(-z) <= 1.
///
/// Tabulated functions store values on a uniform grid over [0, z_max],
/// interpolate linearly, hold the last value beyond z_max and derive
/// negative arguments by reflection.
class SkewingFunction {
 public:
  static SkewingFunction constant_half();
  /// Phi(a z)
  static SkewingFunction probit_scaled(double a);
  /// Phi(z^3 - 2z)
  static SkewingFunction probit_cubic();
  static SkewingFunction tabulated(double z_max, std::vector<double> values);

  double operator()(double z) const noexcept;

  SkewKind kind() const noexcept { return kind_; }
  double slope() const noexcept { return slope_; }
  double z_max() const noexcept { return z_max_; }
  const std::vector<double>& table() const noexcept { return table_; }

 private:
  SkewingFunction(SkewKind kind, double slope, double z_max, std::vector<double> table)
      : kind_(kind), slope_(slope), z_max_(z_max), table_(std::move(table)) {}

  double tabulated_value(double z) const noexcept;

  SkewKind kind_;
  double slope_;
  double z_max_;
  std::vector<double> table_;
};

/// X = xi + omega Z with Z having density 2 f0(z) pi(z).
class GssModel {
 public:
  GssModel(SkewingFunction skew, double xi = 0.0, double omega = 1.0,
           SymmetricBase base = SymmetricBase{});

  const SymmetricBase& base() const noexcept { return base_; }
  const SkewingFunction& skew() const noexcept { return skew_; }
  double xi() const noexcept { return xi_; }
  double omega() const noexcept { return omega_; }

  double pdf(double x) const noexcept;
  /// Density of the standardized variable Z.
  double standardized_pdf(double z) const noexcept { return 2.0 * base_.pdf(z) * skew_(z); }

 private:
  SymmetricBase base_;
  SkewingFunction skew_;
  double xi_;
  double omega_;
};

double gss_pdf(double x, const GssModel& model) noexcept;

/// One exact draw via the reflection representation.
double gss_draw(const GssModel& model, Rng& rng);
std::vector<double> gss_sample(std::size_t n, const GssModel& model, std::uint64_t seed);

/// Integral of x^k times the model density, composite Gauss-Legendre on
/// [xi - 8 omega, xi + 8 omega]. Throws QuadratureFailure if not finite.
double implied_moment(const GssModel& model, int k);
std::complex<double> implied_cf(const GssModel& model, double t);
std::vector<std::complex<double>> implied_cf(const GssModel& model, std::span<const double> ts);

/// Characteristic function of Z = (X - xi) / omega; its imaginary part is s0.
std::complex<double> standardized_cf(const GssModel& model, double t);

double model_mean(const GssModel& model);
double model_variance(const GssModel& model);

}  // namespace gssd
