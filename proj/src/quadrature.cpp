#include "gssdecon/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "gssdecon/errors.hpp"

namespace gssd {

namespace {

GaussLegendreRule compute_gauss_legendre(std::size_t n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = static_cast<double>(n) * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::Domain, "Gauss-Legendre rule needs at least one node");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(compute_gauss_legendre(n));
  return *slot;
}

FrequencyGrid::FrequencyGrid(std::vector<double> nodes, std::vector<double> weights,
                             double t_max)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), t_max_(t_max) {}

FrequencyGrid FrequencyGrid::gauss_legendre(std::size_t n, double t_max) {
  if (!(t_max > 0.0)) throw Error(ErrorKind::Domain, "frequency grid needs t_max > 0");
  const auto& rule = gssd::gauss_legendre(n);
  std::vector<double> nodes(n);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = t_max * rule.nodes[i];
    weights[i] = t_max * rule.weights[i];
  }
  return {std::move(nodes), std::move(weights), t_max};
}

FrequencyGrid FrequencyGrid::trapezoid(std::size_t intervals, double t_max) {
  if (!(t_max > 0.0) || intervals < 2 || intervals % 2 != 0) {
    throw Error(ErrorKind::Domain, "trapezoid grid needs t_max > 0 and an even interval count");
  }
  const double dt = 2.0 * t_max / static_cast<double>(intervals);
  std::vector<double> nodes(intervals + 1);
  std::vector<double> weights(intervals + 1, dt);
  const std::size_t mid = intervals / 2;
  for (std::size_t i = 0; i <= intervals; ++i) {
    // Built from the centre outwards so that t and -t are exact negatives.
    const double k = static_cast<double>(i) - static_cast<double>(mid);
    nodes[i] = k * dt;
  }
  weights.front() = weights.back() = 0.5 * dt;
  return {std::move(nodes), std::move(weights), t_max};
}

double quad_integrate(const std::function<double(double)>& f, const FrequencyGrid& grid) {
  const auto nodes = grid.nodes();
  const auto weights = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double v = f(nodes[i]);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::QuadratureFailure,
                  "integrand not finite at t = " + std::to_string(nodes[i]));
    }
    sum += weights[i] * v;
  }
  return sum;
}

CompositeRule composite_gauss_legendre(double a, double b, std::size_t panels,
                                       std::size_t order) {
  if (!(b > a) || panels == 0) throw Error(ErrorKind::Domain, "composite rule needs b > a");
  const auto& rule = gauss_legendre(order);
  CompositeRule out;
  out.nodes.reserve(panels * order);
  out.weights.reserve(panels * order);
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double centre = a + (static_cast<double>(p) + 0.5) * width;
    for (std::size_t i = 0; i < order; ++i) {
      out.nodes.push_back(centre + 0.5 * width * rule.nodes[i]);
      out.weights.push_back(0.5 * width * rule.weights[i]);
    }
  }
  return out;
}

double trapezoid(std::span<const double> values, double dx) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * dx;
}

}  // namespace gssd
