#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gssd {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1], ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached per n; safe to call from several threads.
const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Quadrature rule on a symmetric frequency interval [-t_max, t_max].
class FrequencyGrid {
 public:
  /// n-point Gauss-Legendre on [-t_max, t_max].
  static FrequencyGrid gauss_legendre(std::size_t n, double t_max);
  /// Composite trapezoid with `intervals` equal steps on [-t_max, t_max].
  static FrequencyGrid trapezoid(std::size_t intervals, double t_max);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double t_max() const noexcept { return t_max_; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  FrequencyGrid(std::vector<double> nodes, std::vector<double> weights, double t_max);

  std::vector<double> nodes_;
  std::vector<double> weights_;
  double t_max_;
};

/// Weighted sum of f over the grid. Throws QuadratureFailure if f is not
/// finite at some node.
double quad_integrate(const std::function<double(double)>& f, const FrequencyGrid& grid);

/// Composite Gauss-Legendre rule on [a, b]: `panels` panels of `order` nodes.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

CompositeRule composite_gauss_legendre(double a, double b, std::size_t panels,
                                       std::size_t order = 16);

/// Trapezoid rule for samples on a uniform grid with spacing dx.
double trapezoid(std::span<const double> values, double dx);

}  // namespace gssd
