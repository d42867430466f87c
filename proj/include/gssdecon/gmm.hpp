#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "gssdecon/distributions.hpp"

namespace gssd {

/// Number of even moments used and the known moment tables.
class MomentSpec {
 public:
  MomentSpec(int moments, const ErrorModel& error, const SymmetricBase& base = SymmetricBase{});

  int moments() const noexcept { return moments_; }
  const ErrorModel& error() const noexcept { return error_; }
  const SymmetricBase& base() const noexcept { return base_; }

 private:
  int moments_;
  ErrorModel error_;
  SymmetricBase base_;
};

/// n^-1 sum ((w - xi)/omega)^{2k}
double t_stat(int k, std::span<const double> w, double xi, double omega);

/// E[T_k] = sum_j C(2k, 2j) omega^{-2(k-j)} E[Z0^{2j}] E[U^{2(k-j)}], valid for
/// 0 <= k <= kMaxMomentIndex.
double t_mean(int k, const MomentSpec& spec, double omega);

/// Sigma_ij = n^-1 (E[T_{i+j}] - E[T_i] E[T_j]), i, j = 1..M.
Eigen::MatrixXd sigma_matrix(const MomentSpec& spec, double omega, std::size_t n);

/// D(xi, omega) = T' Sigma^-1 T with T_k = T_k(xi, omega) - E[T_k]. Evaluated
/// from centred power sums, so each call costs O(M^2) after an O(n M) setup.
class MomentObjective {
 public:
  MomentObjective(std::span<const double> w, MomentSpec spec);

  double operator()(double xi, double omega) const;
  /// T_k(xi, omega) for k = 1..M.
  Eigen::VectorXd statistics(double xi, double omega) const;
  Eigen::VectorXd residuals(double xi, double omega) const;

  std::size_t n() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double sd() const noexcept { return sd_; }
  const MomentSpec& spec() const noexcept { return spec_; }

 private:
  MomentSpec spec_;
  std::size_t n_;
  double mean_;
  double sd_;
  std::vector<double> central_;  ///< n^-1 sum (w - mean)^p, p = 0..2M
};

double d_objective(double xi, double omega, std::span<const double> w, const MomentSpec& spec);

struct GmmStart {
  double xi;
  double omega;
};

struct GmmSolution {
  double xi = 0.0;
  double omega = 0.0;
  double d = 0.0;
  bool converged = false;
  int basin = 0;  ///< rank after sorting by D
  int starts = 0;  ///< number of starts that ended in this solution
};

struct GmmOptions {
  int max_iterations = 500;       ///< per start (and per restart)
  double size_tolerance = 1e-7;   ///< simplex size in (xi / sd, log omega)
  double dedup_tolerance = 1e-3;  ///< relative to max(1, sd of w)
};

/// Starts over 9 quantiles of w and {0.25, 0.5, 1, 2} times the implied signal
/// standard deviation (S_W^2 - sigma_U^2)^{1/2}.
std::vector<GmmStart> default_starts(std::span<const double> w, const MomentSpec& spec);

/// Local Nelder-Mead minimization from every start; converged solutions are
/// deduplicated and sorted by D. Throws EstimationFailure if none converge.
std::vector<GmmSolution> gmm_solve(std::span<const double> w, const MomentSpec& spec,
                                   std::span<const GmmStart> starts,
                                   const GmmOptions& options = {});
std::vector<GmmSolution> gmm_solve(std::span<const double> w, const MomentSpec& spec,
                                   const GmmOptions& options = {});

}  // namespace gssd
