#include "gssdecon/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "gssdecon/errors.hpp"
#include "gssdecon/quadrature.hpp"

namespace gssd {

const char* to_string(SelectionCriterion criterion) noexcept {
  switch (criterion) {
    case SelectionCriterion::Skewness: return "skewness";
    case SelectionCriterion::Phase: return "phase";
    case SelectionCriterion::MinIse: return "minise";
    case SelectionCriterion::Random: return "random";
  }
  return "unknown";
}

double NonparFit::density_at(double xv) const noexcept {
  if (x.empty() || xv < x.front() || xv > x.back()) return 0.0;
  const auto it = std::upper_bound(x.begin(), x.end(), xv);
  if (it == x.end()) return density.back();
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (i == 0) return density.front();
  const double x0 = x[i - 1];
  const double x1 = x[i];
  const double a = x1 > x0 ? (xv - x0) / (x1 - x0) : 0.0;
  return density[i - 1] + a * (density[i] - density[i - 1]);
}

namespace {

constexpr std::size_t kReseed = 64;

void check_scale(double omega, double h) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorKind::Domain, "scale parameter must be positive");
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::Domain, "bandwidth must be positive");
}

std::vector<double> standardize(std::span<const double> w, double xi, double omega) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = (w[i] - xi) / omega;
  return out;
}

/// Highest usable frequency, limited by the error cf floor.
double frequency_cap(double t_limit, double cap) {
  if (!(t_limit > 0.0) || !std::isfinite(t_limit)) {
    throw Error(ErrorKind::Domain, "frequency limit must be positive and finite");
  }
  return std::min(t_limit, cap);
}

/// Step no larger than `step` that places t_end on the grid.
std::pair<double, std::size_t> aligned_step(double t_end, double step) {
  const auto intervals =
      static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / step - 1e-9)));
  return {t_end / static_cast<double>(intervals), intervals};
}

EmpiricalSpectrum make_spectrum(std::span<const double> data, double reach, double t_limit,
                                double cap, bool with_cos) {
  if (data.empty()) throw Error(ErrorKind::InsufficientData, "empty sample");
  const double t_end = frequency_cap(t_limit, cap);
  const auto [dt, intervals] = aligned_step(t_end, EmpiricalSpectrum::default_step(data, reach));
  return EmpiricalSpectrum(data, dt, intervals, with_cos);
}

/// 2 dt sum_k g_k sin(k dt z): the trapezoid value of the integral of
/// sin(tz) g(t) over [-T, T] for odd g vanishing at the ends.
double sine_sum(const std::vector<double>& g, double dt, double z) {
  const double cr = std::cos(dt * z);
  const double sr = std::sin(dt * z);
  double c = 1.0;
  double s = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k % kReseed == 0) {
      const double tz = dt * static_cast<double>(k) * z;
      c = std::cos(tz);
      s = std::sin(tz);
    }
    acc += g[k] * s;
    const double cn = c * cr - s * sr;
    s = s * cr + c * sr;
    c = cn;
  }
  return 2.0 * dt * acc;
}

double skew_from_integral(double integral, double f0) {
  return 0.5 + integral / (4.0 * std::numbers::pi * f0);
}

}  // namespace

SkewEstimator::SkewEstimator(std::span<const double> w, double xi, double omega,
                             const ErrorModel& error, double t_limit, ZGrid zgrid)
    : xi_(xi),
      omega_(omega),
      error_(error),
      zgrid_(zgrid),
      wstar_((check_scale(omega, 1.0), standardize(w, xi, omega))),
      spectrum_(make_spectrum(wstar_, zgrid.z_max, t_limit, degenerate_frequency(error, omega),
                              false)) {
  if (zgrid_.points < 2 || !(zgrid_.z_max > 0.0)) {
    throw Error(ErrorKind::Domain, "z-grid needs at least two points on a positive range");
  }
}

std::vector<double> SkewEstimator::s0_on_grid(double h) const {
  check_scale(omega_, h);
  const double t_end = 1.0 / h;
  if (t_end > spectrum_.t_max() * (1.0 + 1e-12)) {
    throw Error(ErrorKind::DivisionDegeneracy,
                "bandwidth " + std::to_string(h) + " needs frequencies beyond the usable range");
  }
  const SmoothingKernelCF kernel;
  const double n = static_cast<double>(spectrum_.n());
  std::vector<double> g;
  g.reserve(spectrum_.size());
  for (std::size_t k = 0; k < spectrum_.size(); ++k) {
    const double t = spectrum_.t(k);
    const double wk = kernel(h * t);
    if (wk == 0.0 && k > 0) break;
    const double psi = error_.cf(t / omega_);
    g.push_back(wk * spectrum_.sin_sum(k) / (n * psi));
  }
  return g;
}

std::vector<double> SkewEstimator::raw_table(double h) const {
  const std::vector<double> g = s0_on_grid(h);
  const SymmetricBase base;
  std::vector<double> out(zgrid_.points);
  out[0] = 0.5;
  for (std::size_t i = 1; i < zgrid_.points; ++i) {
    const double z = zgrid_.z(i);
    const double f0 = base.pdf(z);
    if (!(f0 > kDegenerateCf)) {
      out[i] = out[i - 1];
      continue;
    }
    out[i] = skew_from_integral(sine_sum(g, spectrum_.dt(), z), f0);
  }
  return out;
}

DeconvFit SkewEstimator::fit(double h) const {
  std::vector<double> table = raw_table(h);
  for (double& v : table) v = clip_skew(v);
  GssModel model(SkewingFunction::tabulated(zgrid_.z_max, std::move(table)), xi_, omega_);
  return DeconvFit{std::move(model), h, EstimatorKind::Gss, std::nullopt};
}

DeconvFit gss_fit(std::span<const double> w, double xi, double omega, const ErrorModel& error,
                  double h, ZGrid zgrid) {
  check_scale(omega, h);
  if (1.0 / h > degenerate_frequency(error, omega)) {
    throw Error(ErrorKind::DivisionDegeneracy,
                "bandwidth " + std::to_string(h) + " needs frequencies beyond the usable range");
  }
  return SkewEstimator(w, xi, omega, error, 1.0 / h, zgrid).fit(h);
}

double skew_hat(double z, std::span<const double> wstar, const ErrorModel& error, double omega,
                double h) {
  check_scale(omega, h);
  if (wstar.empty()) throw Error(ErrorKind::InsufficientData, "empty sample");
  const double f0 = normal_pdf(z);
  if (!(f0 > kDegenerateCf)) {
    throw Error(ErrorKind::TailUndefined, "base density underflows at z = " + std::to_string(z));
  }
  if (z == 0.0) return 0.5;
  const double t_end = 1.0 / h;
  if (t_end > degenerate_frequency(error, omega)) {
    throw Error(ErrorKind::DivisionDegeneracy,
                "bandwidth " + std::to_string(h) + " needs frequencies beyond the usable range");
  }
  const EmpiricalSpectrum spec = make_spectrum(wstar, std::abs(z), t_end, t_end, false);
  const SmoothingKernelCF kernel;
  const double n = static_cast<double>(wstar.size());
  std::vector<double> g(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double t = spec.t(k);
    g[k] = kernel(h * t) * spec.sin_sum(k) / (n * error.cf(t / omega));
  }
  return skew_from_integral(sine_sum(g, spec.dt(), z), f0);
}

double skew_corrected(double z, std::span<const double> wstar, const ErrorModel& error,
                      double omega, double h) {
  const double v = clip_skew(skew_hat(std::abs(z), wstar, error, omega, h));
  return z < 0.0 ? 1.0 - v : v;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw Error(ErrorKind::Domain, "invalid grid");
  std::vector<double> x(points);
  const double dx = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) x[i] = lo + dx * static_cast<double>(i);
  x.back() = hi;
  return x;
}

std::vector<double> default_xgrid(std::span<const double> w, std::size_t points) {
  if (w.size() < 2) throw Error(ErrorKind::InsufficientData, "need at least two observations");
  const auto [mn, mx] = std::minmax_element(w.begin(), w.end());
  const double n = static_cast<double>(w.size());
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : w) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double pad = 3.0 * (sd > 0.0 ? sd : 1.0);
  return uniform_grid(*mn - pad, *mx + pad, points);
}

namespace {

std::vector<double> centred(std::span<const double> w, double centre) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] - centre;
  return out;
}

double mean_of(std::span<const double> w) {
  if (w.empty()) throw Error(ErrorKind::InsufficientData, "empty sample");
  return std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
}

double grid_reach(const std::vector<double>& x, double centre) {
  if (x.empty()) throw Error(ErrorKind::Domain, "empty x-grid");
  return std::max(std::abs(x.front() - centre), std::abs(x.back() - centre));
}

}  // namespace

NonparEstimator::NonparEstimator(std::span<const double> w, const ErrorModel& error,
                                 std::vector<double> xgrid, double t_limit)
    : error_(error),
      xgrid_(std::move(xgrid)),
      centre_(mean_of(w)),
      spectrum_(make_spectrum(centred(w, centre_), grid_reach(xgrid_, centre_), t_limit,
                              degenerate_frequency(error, 1.0), true)) {
  if (!std::is_sorted(xgrid_.begin(), xgrid_.end())) {
    throw Error(ErrorKind::Domain, "x-grid must be sorted");
  }
}

std::vector<double> NonparEstimator::raw(double h) const {
  check_scale(1.0, h);
  if (1.0 / h > spectrum_.t_max() * (1.0 + 1e-12)) {
    throw Error(ErrorKind::DivisionDegeneracy,
                "bandwidth " + std::to_string(h) + " needs frequencies beyond the usable range");
  }
  const SmoothingKernelCF kernel;
  const double n = static_cast<double>(spectrum_.n());
  const double dt = spectrum_.dt();
  std::vector<double> gc;
  std::vector<double> gs;
  for (std::size_t k = 0; k < spectrum_.size(); ++k) {
    const double t = spectrum_.t(k);
    const double wk = kernel(h * t);
    if (wk == 0.0 && k > 0) break;
    const double scale = wk / (n * error_.cf(t)) * (k == 0 ? 0.5 : 1.0);
    gc.push_back(scale * spectrum_.cos_sum(k));
    gs.push_back(scale * spectrum_.sin_sum(k));
  }
  std::vector<double> f(xgrid_.size());
  for (std::size_t i = 0; i < xgrid_.size(); ++i) {
    const double u = xgrid_[i] - centre_;
    const double cr = std::cos(dt * u);
    const double sr = std::sin(dt * u);
    double c = 1.0;
    double s = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < gc.size(); ++k) {
      if (k % kReseed == 0) {
        const double tu = dt * static_cast<double>(k) * u;
        c = std::cos(tu);
        s = std::sin(tu);
      }
      acc += gc[k] * c + gs[k] * s;
      const double cn = c * cr - s * sr;
      s = s * cr + c * sr;
      c = cn;
    }
    f[i] = dt * acc / std::numbers::pi;
  }
  return f;
}

NonparFit NonparEstimator::fit(double h) const {
  std::vector<double> f = raw(h);
  bool truncated = false;
  for (double& v : f) {
    if (v < 0.0) {
      v = 0.0;
      truncated = true;
    }
  }
  double mass = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    mass += 0.5 * (f[i] + f[i - 1]) * (xgrid_[i] - xgrid_[i - 1]);
  }
  if (mass > 0.0) {
    for (double& v : f) v /= mass;
  }
  return NonparFit{xgrid_, std::move(f), h, truncated};
}

NonparFit np_fit(std::span<const double> w, const ErrorModel& error, double h,
                 std::vector<double> xgrid) {
  check_scale(1.0, h);
  return NonparEstimator(w, error, std::move(xgrid), 1.0 / h).fit(h);
}

IseGrid::IseGrid(const GssModel& truth, double lo, double hi, std::size_t points)
    : x_(uniform_grid(lo, hi, points)), truth_(points), dx_((hi - lo) / double(points - 1)) {
  for (std::size_t i = 0; i < points; ++i) truth_[i] = truth.pdf(x_[i]);
}

double IseGrid::operator()(const std::function<double(double)>& density) const {
  std::vector<double> sq(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double d = density(x_[i]) - truth_[i];
    sq[i] = d * d;
  }
  return trapezoid(sq, dx_);
}

double IseGrid::operator()(const DeconvFit& fit) const {
  return (*this)([&fit](double x) { return fit.density(x); });
}

double IseGrid::operator()(const NonparFit& fit) const {
  return (*this)([&fit](double x) { return fit.density_at(x); });
}

namespace {

std::size_t ise_points(double lo, double hi, double finest_scale) {
  const double want = (hi - lo) / (finest_scale / 40.0);
  return static_cast<std::size_t>(std::clamp(want, 2001.0, 200001.0));
}

}  // namespace

double ise(const DeconvFit& fit, const GssModel& truth) {
  const double lo = std::min(fit.xi() - 8.0 * fit.omega(), truth.xi() - 8.0 * truth.omega());
  const double hi = std::max(fit.xi() + 8.0 * fit.omega(), truth.xi() + 8.0 * truth.omega());
  const double scale = std::min(fit.omega(), truth.omega());
  return IseGrid(truth, lo, hi, ise_points(lo, hi, scale))(fit);
}

double ise(const NonparFit& fit, const GssModel& truth) {
  if (fit.x.size() < 2) throw Error(ErrorKind::Domain, "fit grid needs at least two points");
  const double lo = std::min(fit.x.front(), truth.xi() - 8.0 * truth.omega());
  const double hi = std::max(fit.x.back(), truth.xi() + 8.0 * truth.omega());
  double finest = truth.omega();
  for (std::size_t i = 1; i < fit.x.size(); ++i) {
    finest = std::min(finest, 40.0 * (fit.x[i] - fit.x[i - 1]));
  }
  return IseGrid(truth, lo, hi, ise_points(lo, hi, finest))(fit);
}

double ise(std::span<const double> x, std::span<const double> density, const GssModel& truth) {
  if (x.size() != density.size()) throw Error(ErrorKind::Domain, "grid and density sizes differ");
  NonparFit fit{std::vector<double>(x.begin(), x.end()),
                std::vector<double>(density.begin(), density.end()), 0.0, false};
  return ise(fit, truth);
}

}  // namespace gssd
