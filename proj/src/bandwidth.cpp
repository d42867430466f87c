#include "gssdecon/bandwidth.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "gssdecon/errors.hpp"
#include "gssdecon/quadrature.hpp"

namespace gssd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

}  // namespace

void BandwidthSearch::validate() const {
  if (!(h_min > 0.0) || !(h_max > h_min) || !std::isfinite(h_max)) {
    throw Error(ErrorKind::Config, "bandwidth search needs 0 < h_min < h_max");
  }
  if (grid_points < 20) throw Error(ErrorKind::Config, "bandwidth grid needs at least 20 points");
  if (!(tolerance > 0.0) || tolerance >= 0.1) {
    throw Error(ErrorKind::Config, "bandwidth tolerance must lie in (0, 0.1)");
  }
}

std::vector<double> BandwidthSearch::grid() const {
  validate();
  std::vector<double> g(grid_points);
  const double a = std::log(h_min);
  const double b = std::log(h_max);
  for (std::size_t i = 0; i < grid_points; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(grid_points - 1));
  }
  g.front() = h_min;
  g.back() = h_max;
  return g;
}

BandwidthChoice minimize_bandwidth(const std::function<double(double)>& objective,
                                   const BandwidthSearch& search) {
  const std::vector<double> grid = search.grid();
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = finite_or_inf(objective(grid[i]));

  const auto best_it = std::min_element(values.begin(), values.end());
  if (!std::isfinite(*best_it)) {
    throw Error(ErrorKind::EstimationFailure, "bandwidth objective is not finite on the grid");
  }
  const double lo_v = *best_it;
  const double hi_v = *std::max_element(values.begin(), values.end());
  if (hi_v - lo_v <= 1e-14 * (1.0 + std::abs(lo_v))) {
    const double mid = 0.5 * (search.h_min + search.h_max);
    return {mid, finite_or_inf(objective(mid)), false, true};
  }
  const auto best = static_cast<std::size_t>(best_it - values.begin());
  if (best == 0 || best + 1 == grid.size()) return {grid[best], values[best], true, false};

  const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(search.tolerance))), 8,
                              std::numeric_limits<double>::digits / 2);
  std::uintmax_t iterations = 200;
  const auto [h, v] = boost::math::tools::brent_find_minima(
      [&](double x) { return finite_or_inf(objective(x)); }, grid[best - 1], grid[best + 1], bits,
      iterations);
  if (v <= values[best]) return {h, v, false, false};
  return {grid[best], values[best], false, false};
}

// Data-driven objectives -----------------------------------------------------

namespace {

/// The integrands vanish only to third order at 1/h, leaving an O(dt^4)
/// endpoint term in the trapezoid rule.
constexpr double kObjectiveStep = 0.02;
constexpr double kSignalStep = 0.002;

}  // namespace

SpectralObjectives::SpectralObjectives(std::span<const double> wstar, const ErrorModel& error,
                                       double omega, double h_min, double kappa,
                                       bool with_mise)
    : n_(static_cast<double>(wstar.size())), kappa_(kappa) {
  if (wstar.size() < 2) throw Error(ErrorKind::InsufficientData, "need at least 2 observations");
  if (!(omega > 0.0)) throw Error(ErrorKind::Domain, "scale parameter must be positive");
  if (!(h_min > 0.0)) throw Error(ErrorKind::Domain, "bandwidth must be positive");
  if (!(kappa > 0.0)) throw Error(ErrorKind::Domain, "kappa must be positive");
  const double t_end = std::min(1.0 / h_min, degenerate_frequency(error, omega, kObjectiveCfFloor));
  // Squared sine sums oscillate at up to twice the data reach.
  double reach = 0.0;
  for (double v : wstar) reach = std::max(reach, std::abs(v));
  const double step = std::min(kObjectiveStep, EmpiricalSpectrum::default_step(wstar, reach));
  const auto intervals = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / step - 1e-9)));
  dt_ = t_end / static_cast<double>(intervals);
  const EmpiricalSpectrum spec(wstar, dt_, intervals);
  const std::size_t size = spec.size();
  t_.resize(size);
  sq_mean_.resize(size);
  cross_.resize(size);
  variance_.resize(size);
  const double pairs = n_ * (n_ - 1.0);
  for (std::size_t k = 0; k < size; ++k) {
    const double t = spec.t(k);
    const double psi = error.cf(t / omega);
    const double psi2 = psi * psi;
    const double s = spec.sin_sum(k);
    const double u = (s * s - spec.sin_sq_sum(k)) / pairs;
    t_[k] = t;
    sq_mean_[k] = (s / n_) * (s / n_) / psi2;
    cross_[k] = u / psi2;
    variance_[k] = (1.0 - error.cf(2.0 * t / omega) * std::exp(-2.0 * t * t)) / (2.0 * n_ * psi2);
  }
  // The s0^2 estimate has kinks where it is clipped, so it gets its own fine
  // grid on [0, min(kappa, t_end)].
  if (!with_mise) return;
  const double s2_end = std::min(kappa, t_end);
  const auto s2_intervals =
      static_cast<std::size_t>(std::max(1.0, std::ceil(s2_end / kSignalStep - 1e-9)));
  const EmpiricalSpectrum fine(wstar, s2_end / static_cast<double>(s2_intervals), s2_intervals);
  s2_t_.resize(fine.size());
  s2_.resize(fine.size());
  for (std::size_t k = 0; k < fine.size(); ++k) {
    const double t = fine.t(k);
    const double psi = error.cf(t / omega);
    const double s = fine.sin_sum(k);
    s2_t_[k] = t;
    s2_[k] = (s * s - fine.sin_sq_sum(k)) / (pairs * psi * psi);
  }
}

double SpectralObjectives::cv(double h) const {
  if (!(h > 0.0)) throw Error(ErrorKind::Domain, "bandwidth must be positive");
  if (1.0 / h > t_.back() * (1.0 + 1e-12)) return kInf;
  const SmoothingKernelCF kernel;
  double acc = 0.0;
  for (std::size_t k = 1; k < t_.size(); ++k) {
    const double a = kernel(h * t_[k]);
    if (a == 0.0) break;
    acc += a * (a * sq_mean_[k] - 2.0 * cross_[k]);
  }
  return 2.0 * dt_ * acc;
}

double SpectralObjectives::mise(double h) const {
  if (!(h > 0.0)) throw Error(ErrorKind::Domain, "bandwidth must be positive");
  if (s2_.empty()) throw Error(ErrorKind::Config, "objectives were built without the MISE terms");
  if (1.0 / h > t_.back() * (1.0 + 1e-12)) return kInf;
  const SmoothingKernelCF kernel;
  const double ratio = (n_ - 1.0) / n_;
  // Smooth factor multiplying the (clipped) s0^2 estimate.
  const auto factor = [&](double t) {
    const double a = kernel(h * t);
    return (ratio * a - 2.0) * a;
  };
  double acc = 0.0;
  for (std::size_t k = 1; k < t_.size(); ++k) {
    const double a = kernel(h * t_[k]);
    if (a == 0.0) break;
    acc += a * a * variance_[k];
  }
  acc *= dt_;
  // The s0^2 estimate is clipped at zero and cut off at kappa. Integrate the
  // positive part piecewise, locating sign changes and the cut by linear
  // interpolation, so the kinks do not cost accuracy.
  const double cut = std::min(kappa_, 1.0 / h);
  double sig = 0.0;
  for (std::size_t k = 0; k + 1 < s2_.size() && s2_t_[k] < cut; ++k) {
    double t0 = s2_t_[k];
    double t1 = s2_t_[k + 1];
    double r0 = s2_[k];
    double r1 = s2_[k + 1];
    if (t1 > cut) {
      r1 = r0 + (r1 - r0) * (cut - t0) / (t1 - t0);
      t1 = cut;
    }
    if (r0 <= 0.0 && r1 <= 0.0) continue;
    if (r0 < 0.0) {
      t0 += (t1 - t0) * r0 / (r0 - r1);
      r0 = 0.0;
    } else if (r1 < 0.0) {
      t1 = t0 + (t1 - t0) * r0 / (r0 - r1);
      r1 = 0.0;
    }
    sig += 0.5 * (t1 - t0) * (factor(t0) * r0 + factor(t1) * r1);
  }
  return 2.0 * (acc + sig);
}

double cv_score(double h, std::span<const double> wstar, const ErrorModel& error, double omega) {
  if (!(h > 0.0)) throw Error(ErrorKind::Domain, "bandwidth must be positive");
  if (1.0 / h > degenerate_frequency(error, omega, kObjectiveCfFloor)) {
    throw Error(ErrorKind::DivisionDegeneracy, "error cf underflows inside [-1/h, 1/h]");
  }
  return SpectralObjectives(wstar, error, omega, h, kDefaultKappa, false).cv(h);
}

double mise_approx(double h, std::span<const double> wstar, const ErrorModel& error, double omega,
                   double kappa) {
  if (!(h > 0.0)) throw Error(ErrorKind::Domain, "bandwidth must be positive");
  if (1.0 / h > degenerate_frequency(error, omega, kObjectiveCfFloor)) {
    throw Error(ErrorKind::DivisionDegeneracy, "error cf underflows inside [-1/h, 1/h]");
  }
  return SpectralObjectives(wstar, error, omega, h, kappa).mise(h);
}

// Exact MISE -----------------------------------------------------------------

namespace {

constexpr double kTruthStep = 0.01;
constexpr double kTruthCap = 400.0;
constexpr double kTruthChunk = 5.0;

}  // namespace

TruthSpectrum::TruthSpectrum(const GssModel& truth, const ErrorModel& error)
    : omega_(truth.omega()), error_(error), dt_(kTruthStep) {
  const GssModel standard(truth.skew(), 0.0, 1.0, truth.base());
  const auto per_chunk = static_cast<std::size_t>(std::lround(kTruthChunk / dt_));
  s0_.push_back(0.0);
  double quiet_since = 0.0;
  double t0 = 0.0;
  while (t0 < kTruthCap) {
    std::vector<double> ts(per_chunk);
    for (std::size_t i = 0; i < per_chunk; ++i) ts[i] = t0 + dt_ * static_cast<double>(i + 1);
    const auto cf = implied_cf(standard, ts);
    bool quiet = true;
    for (const auto& c : cf) {
      s0_.push_back(c.imag());
      if (std::abs(c.imag()) > 1e-9) quiet = false;
    }
    t0 = ts.back();
    if (!quiet) quiet_since = t0;
    if (t0 >= 10.0 && t0 - quiet_since >= 4.0 * kTruthChunk) break;
  }
  t_max_ = dt_ * static_cast<double>(s0_.size() - 1);
  tail_.assign(s0_.size(), 0.0);
  for (std::size_t k = s0_.size() - 1; k-- > 0;) {
    tail_[k] = tail_[k + 1] + 0.5 * dt_ * (s0_[k] * s0_[k] + s0_[k + 1] * s0_[k + 1]);
  }
}

double TruthSpectrum::s0(double t) const {
  t = std::abs(t);
  if (t >= t_max_) return 0.0;
  const double a = t / dt_;
  const auto i = static_cast<std::size_t>(a);
  const double f = a - static_cast<double>(i);
  return s0_[i] + f * (s0_[i + 1] - s0_[i]);
}

double TruthSpectrum::mise(double h, std::size_t n) const {
  if (!(h > 0.0)) throw Error(ErrorKind::Domain, "bandwidth must be positive");
  if (n < 1) throw Error(ErrorKind::InsufficientData, "sample size must be positive");
  const double t_end = 1.0 / h;
  if (t_end > degenerate_frequency(error_, omega_, kObjectiveCfFloor)) return kInf;
  const SmoothingKernelCF kernel;
  const double nn = static_cast<double>(n);
  const auto intervals = static_cast<std::size_t>(std::max(400.0, std::ceil(t_end / (0.25 * dt_))));
  const double step = t_end / static_cast<double>(intervals);
  double acc = 0.0;
  for (std::size_t k = 1; k < intervals; ++k) {
    const double t = step * static_cast<double>(k);
    const double a = kernel(h * t);
    const double psi = error_.cf(t / omega_);
    const double s = s0(t);
    const double var = (1.0 - std::exp(-2.0 * t * t) * error_.cf(2.0 * t / omega_)) /
                       (2.0 * psi * psi);
    acc += a * a / nn * (var - s * s) + (a - 1.0) * (a - 1.0) * s * s;
  }
  acc *= step;
  if (t_end < t_max_) {
    const double a = t_end / dt_;
    const auto i = static_cast<std::size_t>(a);
    const double f = a - static_cast<double>(i);
    const double partial = (1.0 - f) * dt_ * 0.5 * (s0(t_end) * s0(t_end) + s0_[i + 1] * s0_[i + 1]);
    acc += partial + tail_[i + 1];
  }
  return acc / (std::numbers::pi * omega_);
}

double mise_exact(double h, const GssModel& truth, const ErrorModel& error, std::size_t n) {
  return TruthSpectrum(truth, error).mise(h, n);
}

// Plug-in --------------------------------------------------------------------

namespace {

constexpr double kKernelMu2 = SmoothingKernelCF::second_moment();

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// Integral of (f^(r))^2 for a normal density with standard deviation sigma.
double normal_theta(int r, double sigma) {
  return factorial(2 * r) /
         (std::pow(2.0 * sigma, 2 * r + 1) * factorial(r) * std::sqrt(std::numbers::pi));
}

/// Integral over [0, 1/g] of t^{2r} psi_K^2(g t) / psi_U^2(t) * extra(t).
template <class Extra>
double kernel_functional(int r, double g, const ErrorModel& error, std::size_t panels,
                         Extra extra) {
  const auto rule = composite_gauss_legendre(0.0, 1.0, panels);
  const SmoothingKernelCF kernel;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = rule.nodes[i];
    const double t = u / g;
    const double psi = error.cf(t);
    const double k = kernel(u);
    acc += rule.weights[i] * std::pow(t, 2 * r) * k * k / (psi * psi) * extra(t);
  }
  return acc / g;
}

double variance_functional(int r, double g, const ErrorModel& error) {
  return kernel_functional(r, g, error, 8, [](double) { return 1.0; });
}

/// theta_r estimate with pilot g from the empirical cf of y.
double theta_hat(int r, double g, std::span<const double> y, const ErrorModel& error) {
  double reach = 0.0;
  for (double v : y) reach = std::max(reach, std::abs(v));
  const auto panels = static_cast<std::size_t>(
      std::clamp(std::ceil(reach / (g * std::numbers::pi)) + 4.0, 4.0, 400.0));
  const double n = static_cast<double>(y.size());
  return kernel_functional(r, g, error, panels,
                           [&](double t) {
                             double c = 0.0;
                             double s = 0.0;
                             for (double v : y) {
                               c += std::cos(t * v);
                               s += std::sin(t * v);
                             }
                             return (c * c + s * s) / (n * n);
                           }) /
         std::numbers::pi;
}

/// Minimizer of a positive objective over [lo, hi], or NaN if the best value
/// sits on the boundary of the range or is not finite.
double interior_minimum(const std::function<double(double)>& f, double lo, double hi) {
  BandwidthSearch search;
  search.h_min = lo;
  search.h_max = hi;
  search.grid_points = 60;
  try {
    const auto choice = minimize_bandwidth(f, search);
    if (choice.boundary || choice.flat || !std::isfinite(choice.value)) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return choice.h;
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double amise_minimizer(double theta2, double n, const ErrorModel& error) {
  const auto amise = [&](double h) {
    const double v = variance_functional(0, h, error) / (std::numbers::pi * n);
    return v + 0.25 * std::pow(h, 4) * kKernelMu2 * kKernelMu2 * theta2;
  };
  return interior_minimum(amise, 1e-3, 10.0);
}

double pilot(int r, double theta_next, double n, const ErrorModel& error) {
  const auto abias = [&](double g) {
    const double v = variance_functional(r, g, error) / (std::numbers::pi * n);
    return std::abs(v - g * g * kKernelMu2 * theta_next);
  };
  return interior_minimum(abias, 1e-3, 10.0);
}

}  // namespace

PluginResult plugin_bandwidth_detail(std::span<const double> w, const ErrorModel& error) {
  if (w.size() < 10) throw Error(ErrorKind::InsufficientData, "plug-in needs at least 10 observations");
  const double n = static_cast<double>(w.size());
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : w) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw Error(ErrorKind::InsufficientData, "data have zero variance");

  std::vector<double> y(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) y[i] = (w[i] - mean) / sd;
  const ErrorModel ey = error.scaled(1.0 / sd);
  const double sigma_x = std::sqrt(std::max(1.0 - ey.variance(), 0.05));

  const double h_ref = amise_minimizer(normal_theta(2, sigma_x), n, ey);
  PluginResult out;
  const double g3 = pilot(3, normal_theta(4, sigma_x), n, ey);
  double h = std::numeric_limits<double>::quiet_NaN();
  if (std::isfinite(g3)) {
    const double theta3 = theta_hat(3, g3, y, ey);
    const double g2 = pilot(2, theta3, n, ey);
    if (std::isfinite(g2)) {
      const double theta2 = theta_hat(2, g2, y, ey);
      if (theta2 > 0.0) h = amise_minimizer(theta2, n, ey);
    }
  }
  if (!std::isfinite(h)) {
    if (!std::isfinite(h_ref)) {
      throw Error(ErrorKind::EstimationFailure, "plug-in bandwidth undefined for these data");
    }
    out.converged = false;
    h = h_ref;
  }
  out.h = h * sd;
  return out;
}

double plugin_bandwidth(std::span<const double> w, const ErrorModel& error) {
  return plugin_bandwidth_detail(w, error).h;
}

const char* to_string(BandwidthMethod method) noexcept {
  switch (method) {
    case BandwidthMethod::Cv: return "cv";
    case BandwidthMethod::Mise: return "mise";
    case BandwidthMethod::Plugin: return "plugin";
  }
  return "unknown";
}

BandwidthMethod parse_bandwidth_method(const std::string& name) {
  if (name == "cv") return BandwidthMethod::Cv;
  if (name == "mise") return BandwidthMethod::Mise;
  if (name == "plugin" || name == "pi") return BandwidthMethod::Plugin;
  throw Error(ErrorKind::Config, "unknown bandwidth method '" + name + "' (cv, mise, plugin)");
}

BandwidthChoice select_bandwidth(BandwidthMethod method, std::span<const double> wstar,
                                 const ErrorModel& error, double omega,
                                 const BandwidthSearch& search, double kappa) {
  search.validate();
  if (method == BandwidthMethod::Plugin) {
    const auto pr = plugin_bandwidth_detail(wstar, error.scaled(1.0 / omega));
    const double h = std::clamp(pr.h, search.h_min, search.h_max);
    return {h, 0.0, h != pr.h, false};
  }
  const SpectralObjectives obj(wstar, error, omega, search.h_min, kappa,
                               method == BandwidthMethod::Mise);
  if (method == BandwidthMethod::Cv) {
    return minimize_bandwidth([&](double h) { return obj.cv(h); }, search);
  }
  return minimize_bandwidth([&](double h) { return obj.mise(h); }, search);
}

}  // namespace gssd
