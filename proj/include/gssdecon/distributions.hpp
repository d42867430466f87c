#pragma once

#include <array>
#include <string>

#include "gssdecon/rng.hpp"

namespace gssd {

/// Highest k for which E[Z^{2k}] and E[U^{2k}] are tabulated. The GMM
/// covariance with M = 5 needs moments of order 2(2M) = 20.
inline constexpr int kMaxMomentIndex = 10;

double normal_pdf(double z) noexcept;
double normal_cdf(double z) noexcept;

enum class BaseFamily { StandardNormal };

/// Known symmetric component f0 of a generalized skew-symmetric law.
class SymmetricBase {
 public:
  explicit SymmetricBase(BaseFamily family = BaseFamily::StandardNormal);

  BaseFamily family() const noexcept { return family_; }
  double pdf(double z) const noexcept;
  double cdf(double z) const noexcept;
  double cf(double t) const noexcept;
  /// E[Z0^{2j}] for 0 <= j <= kMaxMomentIndex.
  double even_moment(int j) const;
  double sample(Rng& rng) const;

 private:
  BaseFamily family_;
  std::array<double, kMaxMomentIndex + 1> moments_{};
};

enum class ErrorFamily { Normal, Laplace };

const char* to_string(ErrorFamily family) noexcept;
/// Accepts normal/n and laplace/l (any case); throws Config otherwise.
ErrorFamily parse_error_family(const std::string& name);

/// Known, symmetric measurement-error law parameterized by its variance.
/// A zero variance is accepted and denotes error-free data (cf == 1).
class ErrorModel {
 public:
  ErrorModel(ErrorFamily family, double variance);

  static ErrorModel normal(double variance) { return {ErrorFamily::Normal, variance}; }
  static ErrorModel laplace(double variance) { return {ErrorFamily::Laplace, variance}; }

  ErrorFamily family() const noexcept { return family_; }
  double variance() const noexcept { return variance_; }

  double pdf(double u) const;
  double cf(double t) const noexcept;
  /// E[U^{2k}] for 0 <= k <= kMaxMomentIndex.
  double even_moment(int k) const;
  double sample(Rng& rng) const;

  /// Law of c*U.
  ErrorModel scaled(double c) const;

  /// Smallest t >= 0 with cf(t) < floor (infinity if never).
  double frequency_below(double floor) const noexcept;

 private:
  ErrorFamily family_;
  double variance_;
  std::array<double, kMaxMomentIndex + 1> moments_{};
};

double cf_base(double t, const SymmetricBase& base = SymmetricBase{}) noexcept;
double cf_error(double t, const ErrorModel& model) noexcept;
double even_moment_error(int k, const ErrorModel& model);

}  // namespace gssd
