#include "gssdecon/distributions.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gssdecon/errors.hpp"

namespace gssd {

double normal_pdf(double z) noexcept {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace {

void check_order(int k) {
  if (k < 0 || k > kMaxMomentIndex) {
    throw Error(ErrorKind::UnsupportedOrder,
                "even moment index " + std::to_string(k) + " outside [0, " +
                    std::to_string(kMaxMomentIndex) + "]");
  }
}

}  // namespace

SymmetricBase::SymmetricBase(BaseFamily family) : family_(family) {
  // E[Z0^{2j}] = (2j-1)!!
  moments_[0] = 1.0;
  for (int j = 1; j <= kMaxMomentIndex; ++j) moments_[j] = moments_[j - 1] * (2.0 * j - 1.0);
}

double SymmetricBase::pdf(double z) const noexcept { return normal_pdf(z); }

double SymmetricBase::cdf(double z) const noexcept { return normal_cdf(z); }

double SymmetricBase::cf(double t) const noexcept { return std::exp(-0.5 * t * t); }

double SymmetricBase::even_moment(int j) const {
  check_order(j);
  return moments_[j];
}

double SymmetricBase::sample(Rng& rng) const {
  std::normal_distribution<double> normal;
  return normal(rng);
}

const char* to_string(ErrorFamily family) noexcept {
  return family == ErrorFamily::Normal ? "normal" : "laplace";
}

ErrorFamily parse_error_family(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "normal" || lower == "n") return ErrorFamily::Normal;
  if (lower == "laplace" || lower == "l") return ErrorFamily::Laplace;
  throw Error(ErrorKind::Config, "unknown error family '" + name + "' (expected normal or laplace)");
}

ErrorModel::ErrorModel(ErrorFamily family, double variance)
    : family_(family), variance_(variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw Error(ErrorKind::Domain, "error variance must be finite and >= 0");
  }
  moments_[0] = 1.0;
  if (family_ == ErrorFamily::Normal) {
    // sigma^{2k} (2k-1)!!
    for (int k = 1; k <= kMaxMomentIndex; ++k) {
      moments_[k] = moments_[k - 1] * variance_ * (2.0 * k - 1.0);
    }
  } else {
    // (2k)! b^{2k} with b^2 = variance / 2
    const double b2 = 0.5 * variance_;
    for (int k = 1; k <= kMaxMomentIndex; ++k) {
      moments_[k] = moments_[k - 1] * b2 * (2.0 * k) * (2.0 * k - 1.0);
    }
  }
}

double ErrorModel::pdf(double u) const {
  if (variance_ == 0.0) {
    throw Error(ErrorKind::Domain, "zero-variance error law has no density");
  }
  if (family_ == ErrorFamily::Normal) {
    const double s = std::sqrt(variance_);
    return normal_pdf(u / s) / s;
  }
  const double b = std::sqrt(0.5 * variance_);
  return std::exp(-std::abs(u) / b) / (2.0 * b);
}

double ErrorModel::cf(double t) const noexcept {
  if (family_ == ErrorFamily::Normal) return std::exp(-0.5 * variance_ * t * t);
  return 1.0 / (1.0 + 0.5 * variance_ * t * t);
}

double ErrorModel::even_moment(int k) const {
  check_order(k);
  return moments_[k];
}

double ErrorModel::sample(Rng& rng) const {
  if (variance_ == 0.0) return 0.0;
  if (family_ == ErrorFamily::Normal) {
    std::normal_distribution<double> normal(0.0, std::sqrt(variance_));
    return normal(rng);
  }
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  const double u = uniform(rng);
  const double b = std::sqrt(0.5 * variance_);
  const double mag = -b * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

ErrorModel ErrorModel::scaled(double c) const { return {family_, variance_ * c * c}; }

double ErrorModel::frequency_below(double floor) const noexcept {
  if (variance_ == 0.0 || floor <= 0.0) return std::numeric_limits<double>::infinity();
  if (family_ == ErrorFamily::Normal) return std::sqrt(-2.0 * std::log(floor) / variance_);
  return std::sqrt(2.0 * (1.0 / floor - 1.0) / variance_);
}

double cf_base(double t, const SymmetricBase& base) noexcept { return base.cf(t); }

double cf_error(double t, const ErrorModel& model) noexcept { return model.cf(t); }

double even_moment_error(int k, const ErrorModel& model) { return model.even_moment(k); }

}  // namespace gssd
