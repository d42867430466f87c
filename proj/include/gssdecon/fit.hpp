#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gssdecon/gss.hpp"

namespace gssd {

enum class SelectionCriterion { Skewness, Phase, MinIse, Random };

const char* to_string(SelectionCriterion criterion) noexcept;
/// Accepts skewness/skw, phase/phs, minise/min, random/rnd; throws Config otherwise.
SelectionCriterion parse_selection_criterion(const std::string& name);

/// How one candidate (xi, omega) solution was picked among several.
struct SelectionRecord {
  SelectionCriterion criterion = SelectionCriterion::Phase;
  std::vector<double> scores;  ///< d_j (skewness), R_j (phase) or ISE_j
  std::size_t chosen = 0;
  double tstar = 0.0;  ///< phase window, 0 when unused
  int weight_exponent = 3;
  std::vector<std::string> warnings;
};

enum class EstimatorKind { Gss, Nonparametric };

/// GSS deconvolution estimate: a skew-symmetric model whose skewing function
/// is tabulated from the data.
struct DeconvFit {
  GssModel model{SkewingFunction::constant_half()};
  double h = 0.0;
  EstimatorKind kind = EstimatorKind::Gss;
  std::optional<SelectionRecord> selection;

  double xi() const noexcept { return model.xi(); }
  double omega() const noexcept { return model.omega(); }
  double density(double x) const noexcept { return model.pdf(x); }
};

/// Nonparametric deconvolution density on an x-grid.
struct NonparFit {
  std::vector<double> x;
  std::vector<double> density;
  double h = 0.0;
  bool truncated = false;  ///< negative values were set to zero before rescaling

  /// Linear interpolation; zero outside the grid.
  double density_at(double x) const noexcept;
};

}  // namespace gssd
