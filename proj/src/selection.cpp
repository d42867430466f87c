#include "gssdecon/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "gssdecon/errors.hpp"
#include "gssdecon/gss.hpp"
#include "gssdecon/quadrature.hpp"
#include "gssdecon/spectral.hpp"

namespace gssd {

SelectionCriterion parse_selection_criterion(const std::string& name) {
  if (name == "skewness" || name == "skw") return SelectionCriterion::Skewness;
  if (name == "phase" || name == "phs") return SelectionCriterion::Phase;
  if (name == "minise" || name == "min") return SelectionCriterion::MinIse;
  if (name == "random" || name == "rnd") return SelectionCriterion::Random;
  throw Error(ErrorKind::Config, "unknown selection criterion '" + name + "'");
}

double empirical_skewness_x(std::span<const double> w, double error_variance) {
  if (w.size() < 3) throw Error(ErrorKind::InsufficientData, "need at least 3 observations");
  const double n = static_cast<double>(w.size());
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : w) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  const double signal = m2 - error_variance;
  if (!(signal > 0.0)) {
    throw Error(ErrorKind::NegativeSignalVariance,
                "sample variance does not exceed the error variance");
  }
  return m3 / std::pow(signal, 1.5);
}

double implied_skewness(const DeconvFit& fit) {
  const GssModel standard(fit.model.skew(), 0.0, 1.0, fit.model.base());
  const double m1 = implied_moment(standard, 1);
  const double m2 = implied_moment(standard, 2);
  const double m3 = implied_moment(standard, 3);
  const double var = m2 - m1 * m1;
  if (!(var > 0.0)) throw Error(ErrorKind::Domain, "implied variance is not positive");
  return (m3 - 3.0 * m2 * m1 + 2.0 * m1 * m1 * m1) / std::pow(var, 1.5);
}

std::size_t argmin_score(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::InsufficientData, "no candidates to select from");
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] < scores[best]) best = j;
  }
  return best;
}

namespace {

void require_candidates(std::size_t count) {
  if (count == 0) throw Error(ErrorKind::InsufficientData, "no candidates to select from");
}

}  // namespace

SelectionRecord skewness_select(std::span<const DeconvFit> candidates, std::span<const double> w,
                                double error_variance) {
  require_candidates(candidates.size());
  const double target = empirical_skewness_x(w, error_variance);
  SelectionRecord rec;
  rec.criterion = SelectionCriterion::Skewness;
  for (const auto& c : candidates) rec.scores.push_back(std::abs(target - implied_skewness(c)));
  rec.chosen = argmin_score(rec.scores);
  return rec;
}

double default_tstar(std::span<const double> w) {
  if (w.size() < 2) throw Error(ErrorKind::InsufficientData, "need at least 2 observations");
  const double n = static_cast<double>(w.size());
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : w) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw Error(ErrorKind::InsufficientData, "data have zero variance");
  std::vector<double> u(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) u[j] = (w[j] - mean) / sd;

  constexpr double kStep = 0.001;
  constexpr std::size_t kSteps = 3000;
  const EmpiricalSpectrum spec(u, kStep, kSteps, true);
  const double floor = std::pow(n, -0.25);
  std::size_t last = kSteps;
  for (std::size_t k = 1; k <= kSteps; ++k) {
    const double re = spec.cos_sum(k) / n;
    const double im = spec.sin_sum(k) / n;
    if (std::hypot(re, im) < floor) {
      last = k - 1;
      break;
    }
  }
  if (last == 0) last = 1;
  return spec.t(last) / sd;
}

PhaseReference::PhaseReference(std::span<const double> w, double tstar) : tstar_(tstar) {
  if (!(tstar > 0.0) || !std::isfinite(tstar)) {
    throw Error(ErrorKind::Domain, "phase window t* must be positive");
  }
  if (w.empty()) throw Error(ErrorKind::InsufficientData, "empty sample");
  for (int attempt = 0; attempt < 200; ++attempt) {
    t_.resize(kPhaseNodes);
    phase_.assign(kPhaseNodes, {});
    bool ok = true;
    for (std::size_t i = 0; i < kPhaseNodes; ++i) {
      t_[i] = -tstar_ + 2.0 * tstar_ * static_cast<double>(i) / (kPhaseNodes - 1);
      try {
        phase_[i] = phase_empirical(t_[i], w);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::PhaseUndefined) throw;
        const double shrunk = 0.9 * std::abs(t_[i]);
        std::ostringstream msg;
        msg << "empirical phase undefined at t = " << t_[i] << "; t* reduced from " << tstar_
            << " to " << shrunk;
        warnings_.push_back(msg.str());
        tstar_ = shrunk;
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  if (!(tstar_ > 0.0)) throw Error(ErrorKind::PhaseUndefined, "no usable phase window");
  weight_.resize(kPhaseNodes);
  const double dt = 2.0 * tstar_ / (kPhaseNodes - 1);
  for (std::size_t i = 0; i < kPhaseNodes; ++i) {
    const double r = t_[i] / tstar_;
    weight_[i] = std::pow(std::max(0.0, 1.0 - r * r), kPhaseWeightExponent) * dt;
  }
  weight_.front() *= 0.5;
  weight_.back() *= 0.5;
}

double PhaseReference::distance(const GssModel& model) const {
  const auto cf = implied_cf(model, t_);
  double acc = 0.0;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    const double mod = std::abs(cf[i]);
    if (!(mod > 0.0)) {
      throw Error(ErrorKind::PhaseUndefined, "model characteristic function vanishes");
    }
    acc += weight_[i] * std::abs(phase_[i] - cf[i] / mod);
  }
  return acc;
}

double phase_distance(const DeconvFit& fit, std::span<const double> w, double tstar) {
  return PhaseReference(w, tstar).distance(fit.model);
}

SelectionRecord phase_select(std::span<const DeconvFit> candidates, std::span<const double> w,
                             std::optional<double> tstar) {
  require_candidates(candidates.size());
  const PhaseReference ref(w, tstar ? *tstar : default_tstar(w));
  SelectionRecord rec;
  rec.criterion = SelectionCriterion::Phase;
  rec.tstar = ref.tstar();
  rec.weight_exponent = kPhaseWeightExponent;
  rec.warnings = ref.warnings();
  for (const auto& c : candidates) rec.scores.push_back(ref.distance(c.model));
  rec.chosen = argmin_score(rec.scores);
  return rec;
}

SelectionRecord min_ise_select(std::span<const DeconvFit> candidates, const GssModel& truth) {
  require_candidates(candidates.size());
  SelectionRecord rec;
  rec.criterion = SelectionCriterion::MinIse;
  for (const auto& c : candidates) rec.scores.push_back(ise(c, truth));
  rec.chosen = argmin_score(rec.scores);
  return rec;
}

SelectionRecord random_select(std::size_t count, std::uint64_t seed) {
  require_candidates(count);
  Rng rng(seed);
  SelectionRecord rec;
  rec.criterion = SelectionCriterion::Random;
  rec.chosen = static_cast<std::size_t>(rng() % count);
  rec.scores.assign(count, 1.0);
  rec.scores[rec.chosen] = 0.0;
  return rec;
}

void PipelineConfig::validate() const {
  if (moments < 2 || moments > 5) throw Error(ErrorKind::Config, "moments must lie in [2, 5]");
  if (!(kappa > 0.0)) throw Error(ErrorKind::Config, "kappa must be positive");
  if (tstar && !(*tstar > 0.0)) throw Error(ErrorKind::Config, "t* must be positive");
  if (!(zgrid.z_max > 0.0) || zgrid.points < 2) throw Error(ErrorKind::Config, "invalid z-grid");
  if (gmm.max_iterations < 1 || !(gmm.size_tolerance > 0.0)) {
    throw Error(ErrorKind::Config, "invalid GMM options");
  }
  search.validate();
}

CandidateFit fit_candidate(std::span<const double> w, const ErrorModel& error,
                           const GmmSolution& solution, const PipelineConfig& config) {
  std::vector<double> wstar(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) wstar[j] = (w[j] - solution.xi) / solution.omega;
  const BandwidthChoice choice =
      select_bandwidth(config.bandwidth, wstar, error, solution.omega, config.search, config.kappa);
  DeconvFit fit = gss_fit(w, solution.xi, solution.omega, error, choice.h, config.zgrid);
  return {solution, choice, std::move(fit)};
}

SelectionRecord select_candidate(std::span<const DeconvFit> fits, std::span<const double> w,
                                 const ErrorModel& error, const PipelineConfig& config,
                                 const GssModel* truth) {
  switch (config.selection) {
    case SelectionCriterion::Skewness:
      return skewness_select(fits, w, error.variance());
    case SelectionCriterion::Phase:
      return phase_select(fits, w, config.tstar);
    case SelectionCriterion::MinIse:
      if (truth == nullptr) {
        throw Error(ErrorKind::Config, "min-ISE selection needs the true density");
      }
      return min_ise_select(fits, *truth);
    case SelectionCriterion::Random:
      return random_select(fits.size(), config.seed);
  }
  throw Error(ErrorKind::Config, "unknown selection criterion");
}

PipelineResult run_pipeline(std::span<const double> w, const ErrorModel& error,
                            const PipelineConfig& config, const GssModel* truth) {
  config.validate();
  if (w.size() < 10) throw Error(ErrorKind::InsufficientData, "pipeline needs at least 10 observations");
  if (config.selection == SelectionCriterion::MinIse && truth == nullptr) {
    throw Error(ErrorKind::Config, "min-ISE selection needs the true density");
  }
  PipelineResult out;
  out.solutions = gmm_solve(w, MomentSpec(config.moments, error), config.gmm);
  for (const auto& s : out.solutions) {
    try {
      out.candidates.push_back(fit_candidate(w, error, s, config));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Config) throw;
      ++out.dropped;
    }
  }
  if (out.candidates.empty()) {
    throw Error(ErrorKind::EstimationFailure, "no GMM solution produced a density fit");
  }
  std::vector<DeconvFit> fits;
  for (const auto& c : out.candidates) fits.push_back(c.fit);
  if (fits.size() == 1) {
    out.selection.criterion = config.selection;
    out.selection.scores = {0.0};
    out.selection.chosen = 0;
  } else {
    out.selection = select_candidate(fits, w, error, config, truth);
  }
  out.fit = fits[out.selection.chosen];
  out.fit.selection = out.selection;
  return out;
}

}  // namespace gssd
