#include "gssdecon/gmm.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "gssdecon/errors.hpp"

namespace gssd {

namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kRidge = 1e-10;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorKind::Domain, "scale parameter must be positive");
  }
}

/// T' Sigma^-1 T after scaling both by the Sigma diagonal.
double quadratic_form(const Eigen::VectorXd& r, const Eigen::MatrixXd& sigma) {
  const Eigen::VectorXd scale = sigma.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd rs = r.cwiseProduct(scale);
  Eigen::MatrixXd corr = scale.asDiagonal() * sigma * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double lmax = lambda.maxCoeff();
  if (!(lambda.minCoeff() * kConditionLimit > lmax)) {
    corr.diagonal().array() += kRidge * corr.trace() / static_cast<double>(corr.rows());
    eig.compute(corr);
    lambda = eig.eigenvalues();
  }
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * rs;
  double d = 0.0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    d += proj[i] * proj[i] / std::max(lambda[i], std::numeric_limits<double>::min());
  }
  return d;
}

}  // namespace

MomentSpec::MomentSpec(int moments, const ErrorModel& error, const SymmetricBase& base)
    : moments_(moments), error_(error), base_(base) {
  if (moments < 2 || moments > 5) {
    throw Error(ErrorKind::UnsupportedOrder, "number of moments must lie in [2, 5], got " +
                                                 std::to_string(moments));
  }
}

double t_stat(int k, std::span<const double> w, double xi, double omega) {
  check_omega(omega);
  if (k < 0) throw Error(ErrorKind::UnsupportedOrder, "moment order must be nonnegative");
  if (w.empty()) throw Error(ErrorKind::InsufficientData, "empty sample");
  double acc = 0.0;
  for (double v : w) acc += std::pow((v - xi) / omega, 2 * k);
  return acc / static_cast<double>(w.size());
}

double t_mean(int k, const MomentSpec& spec, double omega) {
  check_omega(omega);
  if (k < 0 || k > kMaxMomentIndex) {
    throw Error(ErrorKind::UnsupportedOrder, "moment order " + std::to_string(k) +
                                                 " outside the tabulated range");
  }
  const double inv2 = 1.0 / (omega * omega);
  double acc = 0.0;
  for (int j = 0; j <= k; ++j) {
    acc += binomial(2 * k, 2 * j) * std::pow(inv2, k - j) * spec.base().even_moment(j) *
           spec.error().even_moment(k - j);
  }
  return acc;
}

Eigen::MatrixXd sigma_matrix(const MomentSpec& spec, double omega, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InsufficientData, "sample size must be positive");
  const int m = spec.moments();
  std::vector<double> e(2 * m + 1);
  for (int k = 0; k <= 2 * m; ++k) e[k] = t_mean(k, spec, omega);
  Eigen::MatrixXd s(m, m);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= m; ++j) s(i - 1, j - 1) = inv_n * (e[i + j] - e[i] * e[j]);
  }
  return s;
}

MomentObjective::MomentObjective(std::span<const double> w, MomentSpec spec)
    : spec_(std::move(spec)), n_(w.size()) {
  if (w.size() < 2) throw Error(ErrorKind::InsufficientData, "need at least 2 observations");
  const double n = static_cast<double>(n_);
  mean_ = std::accumulate(w.begin(), w.end(), 0.0) / n;
  const int pmax = 2 * spec_.moments();
  central_.assign(pmax + 1, 0.0);
  for (double v : w) {
    const double y = v - mean_;
    double p = 1.0;
    for (int k = 0; k <= pmax; ++k) {
      central_[k] += p;
      p *= y;
    }
  }
  for (double& c : central_) c /= n;
  sd_ = std::sqrt(central_[2] * n / (n - 1.0));
}

Eigen::VectorXd MomentObjective::statistics(double xi, double omega) const {
  check_omega(omega);
  const int m = spec_.moments();
  const double d = mean_ - xi;
  std::vector<double> dpow(2 * m + 1, 1.0);
  for (int p = 1; p <= 2 * m; ++p) dpow[p] = dpow[p - 1] * d;
  Eigen::VectorXd t(m);
  for (int k = 1; k <= m; ++k) {
    double acc = 0.0;
    for (int p = 0; p <= 2 * k; ++p) acc += binomial(2 * k, p) * central_[p] * dpow[2 * k - p];
    t[k - 1] = acc / std::pow(omega, 2 * k);
  }
  return t;
}

Eigen::VectorXd MomentObjective::residuals(double xi, double omega) const {
  Eigen::VectorXd r = statistics(xi, omega);
  for (int k = 1; k <= spec_.moments(); ++k) r[k - 1] -= t_mean(k, spec_, omega);
  return r;
}

double MomentObjective::operator()(double xi, double omega) const {
  return quadratic_form(residuals(xi, omega), sigma_matrix(spec_, omega, n_));
}

double d_objective(double xi, double omega, std::span<const double> w, const MomentSpec& spec) {
  check_omega(omega);
  return MomentObjective(w, spec)(xi, omega);
}

std::vector<GmmStart> default_starts(std::span<const double> w, const MomentSpec& spec) {
  if (w.size() < 2) throw Error(ErrorKind::InsufficientData, "need at least 2 observations");
  std::vector<double> sorted(w.begin(), w.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double var = ss / (n - 1.0);
  double signal = var - spec.error().variance();
  if (!(signal > 0.0)) signal = 0.1 * var;
  if (!(signal > 0.0)) throw Error(ErrorKind::InsufficientData, "data have zero variance");
  const double base = std::sqrt(signal);

  const auto quantile = [&](double p) {
    const double h = (n - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  std::vector<GmmStart> starts;
  for (int q = 1; q <= 9; ++q) {
    for (double f : {0.25, 0.5, 1.0, 2.0}) starts.push_back({quantile(0.1 * q), f * base});
  }
  return starts;
}

namespace {

struct SimplexContext {
  const MomentObjective* objective;
  double xi0;
  double scale;
};

double simplex_objective(const gsl_vector* x, void* params) {
  const auto* ctx = static_cast<const SimplexContext*>(params);
  const double xi = ctx->xi0 + ctx->scale * gsl_vector_get(x, 0);
  const double lw = gsl_vector_get(x, 1);
  if (!(std::abs(lw) < 300.0)) return std::numeric_limits<double>::max();
  const double v = (*ctx->objective)(xi, std::exp(lw));
  return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

/// One Nelder-Mead run in (xi offset / scale, log omega). Returns the final
/// point, value and whether the simplex shrank below tolerance.
struct SimplexResult {
  double u;
  double lw;
  double value;
  bool converged;
};

SimplexResult run_simplex(SimplexContext& ctx, double u0, double lw0, double step,
                          const GmmOptions& options) {
  gsl_multimin_function fn{&simplex_objective, 2, &ctx};
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(2));
  std::unique_ptr<gsl_vector, VectorDeleter> steps(gsl_vector_alloc(2));
  gsl_vector_set(x.get(), 0, u0);
  gsl_vector_set(x.get(), 1, lw0);
  gsl_vector_set(steps.get(), 0, step);
  gsl_vector_set(steps.get(), 1, step);
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2));
  gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), steps.get());
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(m.get());
    if (gsl_multimin_test_size(size, options.size_tolerance) == GSL_SUCCESS) {
      converged = true;
      break;
    }
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(m.get());
  return {gsl_vector_get(best, 0), gsl_vector_get(best, 1),
          gsl_multimin_fminimizer_minimum(m.get()), converged};
}

struct GslErrorsOff {
  GslErrorsOff() { gsl_set_error_handler_off(); }
};

}  // namespace

std::vector<GmmSolution> gmm_solve(std::span<const double> w, const MomentSpec& spec,
                                   std::span<const GmmStart> starts, const GmmOptions& options) {
  static const GslErrorsOff gsl_errors_off;
  if (starts.empty()) throw Error(ErrorKind::Config, "GMM needs at least one start");
  if (w.size() < 2 * static_cast<std::size_t>(spec.moments())) {
    throw Error(ErrorKind::InsufficientData, "too few observations for the moment count");
  }
  const MomentObjective objective(w, spec);
  const double scale = objective.sd() > 0.0 ? objective.sd() : 1.0;
  const double dedup = options.dedup_tolerance * std::max(1.0, scale);

  std::vector<GmmSolution> found;
  for (const auto& s : starts) {
    if (!(s.omega > 0.0)) throw Error(ErrorKind::Domain, "start scale must be positive");
    SimplexContext ctx{&objective, s.xi, scale};
    SimplexResult r = run_simplex(ctx, 0.0, std::log(s.omega), 0.25, options);
    // restart from the reported optimum to guard against a collapsed simplex
    const SimplexResult again = run_simplex(ctx, r.u, r.lw, 0.05, options);
    if (again.value <= r.value) r = again;
    const bool converged = r.converged && again.converged;
    const double xi = s.xi + scale * r.u;
    const double omega = std::exp(r.lw);
    if (!converged || !std::isfinite(r.value) || r.value >= std::numeric_limits<double>::max() ||
        !(omega > 1e-6 * scale) || !(omega < 1e6 * scale)) {
      continue;
    }
    bool merged = false;
    for (auto& f : found) {
      if (std::abs(f.xi - xi) <= dedup && std::abs(f.omega - omega) <= dedup) {
        ++f.starts;
        if (r.value < f.d) {
          f.xi = xi;
          f.omega = omega;
          f.d = r.value;
        }
        merged = true;
        break;
      }
    }
    if (!merged) found.push_back({xi, omega, r.value, true, 0, 1});
  }
  if (found.empty()) {
    throw Error(ErrorKind::EstimationFailure, "no GMM start converged");
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const GmmSolution& a, const GmmSolution& b) { return a.d < b.d; });
  for (std::size_t i = 0; i < found.size(); ++i) found[i].basin = static_cast<int>(i);
  return found;
}

std::vector<GmmSolution> gmm_solve(std::span<const double> w, const MomentSpec& spec,
                                   const GmmOptions& options) {
  const auto starts = default_starts(w, spec);
  return gmm_solve(w, spec, starts, options);
}

}  // namespace gssd
