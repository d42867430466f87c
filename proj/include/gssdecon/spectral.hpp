#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "gssdecon/distributions.hpp"

namespace gssd {

/// psi_K(t) = (1 - t^2)^3 on [-1, 1], zero outside.
struct SmoothingKernelCF {
  double operator()(double t) const noexcept {
    const double a = 1.0 - t * t;
    return a > 0.0 ? a * a * a : 0.0;
  }
  static constexpr double support() noexcept { return 1.0; }
  /// c_K in psi_K(t) = 1 - c_K t^2 + O(t^4).
  static constexpr double curvature() noexcept { return 3.0; }
  /// Second moment of the kernel whose Fourier transform is psi_K.
  static constexpr double second_moment() noexcept { return 6.0; }
};

inline constexpr double kDegenerateCf = 1e-300;
inline constexpr double kDefaultKappa = 4.0;

/// (1/psi_U(t/omega)) * mean sin(t W*).
double s0_empirical(double t, std::span<const double> wstar, const ErrorModel& error,
                    double omega);
/// psi_K(h t) * s0_empirical(t); zero for |t| > 1/h.
double s0_smoothed(double t, std::span<const double> wstar, const ErrorModel& error,
                   double omega, double h, const SmoothingKernelCF& kernel = {});
/// Truncated, clipped U-statistic estimate of s0(t)^2. Needs n >= 2.
double s2_hat(double t, std::span<const double> wstar, const ErrorModel& error, double omega,
              double kappa = kDefaultKappa);
/// psi_hat_W(t) / |psi_hat_W(t)|. Throws PhaseUndefined when the modulus is
/// below 1e-12.
std::complex<double> phase_empirical(double t, std::span<const double> w);

/// Frequency beyond which psi_U(t/omega) drops below `floor`.
double degenerate_frequency(const ErrorModel& error, double omega,
                            double floor = kDegenerateCf);

/// Sums of sin(t w_j), sin^2(t w_j) and optionally cos(t w_j) on the uniform
/// grid t_k = k dt, k = 0..intervals. Evaluated by angle rotation, reseeded
/// from exact sin/cos every 64 steps.
class EmpiricalSpectrum {
 public:
  EmpiricalSpectrum(std::span<const double> data, double dt, std::size_t intervals,
                    bool with_cos = false);

  std::size_t n() const noexcept { return n_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return sin_sum_.size(); }
  double t(std::size_t k) const noexcept { return dt_ * static_cast<double>(k); }
  double t_max() const noexcept { return t(size() - 1); }

  double sin_sum(std::size_t k) const noexcept { return sin_sum_[k]; }
  double sin_sq_sum(std::size_t k) const noexcept { return sin_sq_sum_[k]; }
  double cos_sum(std::size_t k) const noexcept { return cos_sum_[k]; }
  bool has_cos() const noexcept { return !cos_sum_.empty(); }

  /// Step resolving every frequency up to max|data| + extra_frequency.
  static double default_step(std::span<const double> data, double extra_frequency);

 private:
  std::size_t n_;
  double dt_;
  std::vector<double> sin_sum_;
  std::vector<double> sin_sq_sum_;
  std::vector<double> cos_sum_;
};

}  // namespace gssd
