#include "gssdecon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gssdecon/errors.hpp"

namespace gssd {

namespace {

double error_cf_checked(double t, const ErrorModel& error, double omega) {
  const double psi = error.cf(t / omega);
  if (!(psi >= kDegenerateCf)) {
    throw Error(ErrorKind::DivisionDegeneracy,
                "error characteristic function underflows at t = " + std::to_string(t));
  }
  return psi;
}

void require_data(std::span<const double> w, std::size_t min_n) {
  if (w.size() < min_n) {
    throw Error(ErrorKind::InsufficientData,
                "need at least " + std::to_string(min_n) + " observations");
  }
}

}  // namespace

double s0_empirical(double t, std::span<const double> wstar, const ErrorModel& error,
                    double omega) {
  require_data(wstar, 1);
  const double psi = error_cf_checked(t, error, omega);
  double s = 0.0;
  for (double w : wstar) s += std::sin(t * w);
  return s / static_cast<double>(wstar.size()) / psi;
}

double s0_smoothed(double t, std::span<const double> wstar, const ErrorModel& error,
                   double omega, double h, const SmoothingKernelCF& kernel) {
  if (!(h > 0.0)) throw Error(ErrorKind::Domain, "bandwidth must be positive");
  const double weight = kernel(h * t);
  if (weight == 0.0) return 0.0;
  return weight * s0_empirical(t, wstar, error, omega);
}

double s2_hat(double t, std::span<const double> wstar, const ErrorModel& error, double omega,
              double kappa) {
  require_data(wstar, 2);
  if (std::abs(t) > kappa) return 0.0;
  const double psi = error_cf_checked(t, error, omega);
  double s = 0.0;
  double q = 0.0;
  for (double w : wstar) {
    const double v = std::sin(t * w);
    s += v;
    q += v * v;
  }
  const double n = static_cast<double>(wstar.size());
  const double u = (s * s - q) / (n * (n - 1.0) * psi * psi);
  return std::max(0.0, u);
}

std::complex<double> phase_empirical(double t, std::span<const double> w) {
  require_data(w, 1);
  double re = 0.0;
  double im = 0.0;
  for (double x : w) {
    re += std::cos(t * x);
    im += std::sin(t * x);
  }
  const double n = static_cast<double>(w.size());
  const std::complex<double> cf(re / n, im / n);
  const double mod = std::abs(cf);
  if (!(mod > 1e-12)) {
    throw Error(ErrorKind::PhaseUndefined,
                "empirical characteristic function vanishes at t = " + std::to_string(t));
  }
  return cf / mod;
}

double degenerate_frequency(const ErrorModel& error, double omega, double floor) {
  return omega * error.frequency_below(floor);
}

EmpiricalSpectrum::EmpiricalSpectrum(std::span<const double> data, double dt,
                                     std::size_t intervals, bool with_cos)
    : n_(data.size()), dt_(dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Domain, "spectrum step must be positive");
  const std::size_t count = intervals + 1;
  const std::size_t n = data.size();
  sin_sum_.assign(count, 0.0);
  sin_sq_sum_.assign(count, 0.0);
  if (with_cos) cos_sum_.assign(count, 0.0);

  std::vector<double> c(n), s(n), cr(n), sr(n);
  for (std::size_t j = 0; j < n; ++j) {
    cr[j] = std::cos(dt * data[j]);
    sr[j] = std::sin(dt * data[j]);
  }
  constexpr std::size_t kReseed = 64;
  for (std::size_t k = 0; k < count; ++k) {
    if (k % kReseed == 0) {
      const double tk = t(k);
      for (std::size_t j = 0; j < n; ++j) {
        c[j] = std::cos(tk * data[j]);
        s[j] = std::sin(tk * data[j]);
      }
    }
    double ssum = 0.0;
    double qsum = 0.0;
    double csum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double cj = c[j];
      const double sj = s[j];
      ssum += sj;
      qsum += sj * sj;
      csum += cj;
      c[j] = cj * cr[j] - sj * sr[j];
      s[j] = sj * cr[j] + cj * sr[j];
    }
    sin_sum_[k] = ssum;
    sin_sq_sum_[k] = qsum;
    if (with_cos) cos_sum_[k] = csum;
  }
}

double EmpiricalSpectrum::default_step(std::span<const double> data, double extra_frequency) {
  double reach = 0.0;
  for (double w : data) reach = std::max(reach, std::abs(w));
  reach += std::abs(extra_frequency);
  constexpr double kMaxStep = 0.05;
  if (reach <= 0.0) return kMaxStep;
  return std::min(kMaxStep, std::numbers::pi / (2.0 * reach));
}

}  // namespace gssd
