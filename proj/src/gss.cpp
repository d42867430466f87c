#include "gssdecon/gss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gssdecon/errors.hpp"
#include "gssdecon/quadrature.hpp"

namespace gssd {

namespace {

constexpr double kSupportHalfWidth = 8.0;
constexpr std::size_t kBasePanels = 32;

// Panel count for integrating exp(itz) against a density on a window of
// half-width `half`: 32 panels of 16 nodes, more once |t| demands at least
// two panels per period.
std::size_t panels_for(double t, double half) {
  const double periods = std::abs(t) * 2.0 * half / (2.0 * std::numbers::pi);
  return std::max(kBasePanels, static_cast<std::size_t>(std::ceil(2.0 * periods)));
}

}  // namespace

SkewingFunction SkewingFunction::constant_half() {
  return {SkewKind::ConstantHalf, 0.0, 0.0, {}};
}

SkewingFunction SkewingFunction::probit_scaled(double a) {
  if (!std::isfinite(a)) throw Error(ErrorKind::Domain, "probit slope must be finite");
  return {SkewKind::ProbitScaled, a, 0.0, {}};
}

SkewingFunction SkewingFunction::probit_cubic() { return {SkewKind::ProbitCubic, 0.0, 0.0, {}}; }

SkewingFunction SkewingFunction::tabulated(double z_max, std::vector<double> values) {
  if (!(z_max > 0.0) || values.size() < 2) {
    throw Error(ErrorKind::Domain, "tabulated skewing function needs z_max > 0 and >= 2 values");
  }
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::Domain, "tabulated skewing values must lie in [0, 1]");
    }
  }
  // pi(0) = 1/2 is forced by the reflection constraint.
  values.front() = 0.5;
  return {SkewKind::Tabulated, 0.0, z_max, std::move(values)};
}

double SkewingFunction::tabulated_value(double z) const noexcept {
  // z >= 0
  const std::size_t last = table_.size() - 1;
  if (z >= z_max_) return table_[last];
  const double pos = z / z_max_ * static_cast<double>(last);
  const auto i = std::min(static_cast<std::size_t>(pos), last - 1);
  const double frac = pos - static_cast<double>(i);
  return table_[i] + frac * (table_[i + 1] - table_[i]);
}

double SkewingFunction::operator()(double z) const noexcept {
  switch (kind_) {
    case SkewKind::ConstantHalf:
      return 0.5;
    case SkewKind::ProbitScaled:
      return normal_cdf(slope_ * z);
    case SkewKind::ProbitCubic:
      return normal_cdf(z * z * z - 2.0 * z);
    case SkewKind::Tabulated:
      return z >= 0.0 ? tabulated_value(z) : 1.0 - tabulated_value(-z);
  }
  return 0.5;
}

GssModel::GssModel(SkewingFunction skew, double xi, double omega, SymmetricBase base)
    : base_(base), skew_(std::move(skew)), xi_(xi), omega_(omega) {
  if (!(omega > 0.0) || !std::isfinite(omega) || !std::isfinite(xi)) {
    throw Error(ErrorKind::Domain, "GSS model needs finite xi and omega > 0");
  }
}

double GssModel::pdf(double x) const noexcept {
  const double z = (x - xi_) / omega_;
  return standardized_pdf(z) / omega_;
}

double gss_pdf(double x, const GssModel& model) noexcept { return model.pdf(x); }

double gss_draw(const GssModel& model, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double z0 = model.base().sample(rng);
  const double v = uniform(rng);
  const double z = v <= model.skew()(z0) ? z0 : -z0;
  return model.xi() + model.omega() * z;
}

std::vector<double> gss_sample(std::size_t n, const GssModel& model, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = gss_draw(model, rng);
  return out;
}

double implied_moment(const GssModel& model, int k) {
  if (k < 0) throw Error(ErrorKind::Domain, "moment order must be >= 0");
  const double half = kSupportHalfWidth * model.omega();
  const auto rule = composite_gauss_legendre(model.xi() - half, model.xi() + half, kBasePanels);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    sum += rule.weights[i] * std::pow(x, k) * model.pdf(x);
  }
  if (!std::isfinite(sum)) {
    throw Error(ErrorKind::QuadratureFailure, "implied moment of order " + std::to_string(k) +
                                                  " is not finite");
  }
  return sum;
}

std::complex<double> standardized_cf(const GssModel& model, double t) {
  const auto rule = composite_gauss_legendre(-kSupportHalfWidth, kSupportHalfWidth,
                                             panels_for(t, kSupportHalfWidth));
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double z = rule.nodes[i];
    const double f = rule.weights[i] * model.standardized_pdf(z);
    re += f * std::cos(t * z);
    im += f * std::sin(t * z);
  }
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw Error(ErrorKind::QuadratureFailure, "characteristic function not finite");
  }
  return {re, im};
}

std::complex<double> implied_cf(const GssModel& model, double t) {
  // exp(it xi) psi_Z(omega t)
  const std::complex<double> shift = std::polar(1.0, t * model.xi());
  return shift * standardized_cf(model, model.omega() * t);
}

std::vector<std::complex<double>> implied_cf(const GssModel& model, std::span<const double> ts) {
  double t_abs = 0.0;
  for (double t : ts) t_abs = std::max(t_abs, std::abs(t));
  const double half = kSupportHalfWidth;
  const auto rule =
      composite_gauss_legendre(-half, half, panels_for(t_abs * model.omega(), half));
  std::vector<double> dens(rule.nodes.size());
  for (std::size_t i = 0; i < dens.size(); ++i) {
    dens[i] = rule.weights[i] * model.standardized_pdf(rule.nodes[i]);
  }
  std::vector<std::complex<double>> out;
  out.reserve(ts.size());
  for (double t : ts) {
    const double u = t * model.omega();
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < dens.size(); ++i) {
      const double a = u * rule.nodes[i];
      re += dens[i] * std::cos(a);
      im += dens[i] * std::sin(a);
    }
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw Error(ErrorKind::QuadratureFailure, "characteristic function not finite");
    }
    out.push_back(std::polar(1.0, t * model.xi()) * std::complex<double>(re, im));
  }
  return out;
}

double model_mean(const GssModel& model) { return implied_moment(model, 1); }

double model_variance(const GssModel& model) {
  // Central second moment of Z, rescaled, to avoid cancellation for large xi.
  const GssModel standard(model.skew(), 0.0, 1.0, model.base());
  const double m1 = implied_moment(standard, 1);
  const double m2 = implied_moment(standard, 2);
  return model.omega() * model.omega() * (m2 - m1 * m1);
}

}  // namespace gssd
