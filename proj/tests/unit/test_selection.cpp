#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "gssdecon/errors.hpp"
#include "gssdecon/gss.hpp"
#include "gssdecon/selection.hpp"
#include "oracles.hpp"

using gssd::DeconvFit;
using gssd::ErrorModel;
using gssd::GssModel;
using gssd::SelectionCriterion;
using gssd::SkewingFunction;

namespace {

const GssModel kPi0(SkewingFunction::constant_half());
const GssModel kPi1(SkewingFunction::probit_scaled(gssd::kSharpProbitSlope));
const GssModel kPi2(SkewingFunction::probit_cubic());

std::vector<double> contaminated(std::size_t n, const GssModel& truth, const ErrorModel& err,
                                 std::uint64_t seed) {
  auto w = gssd::gss_sample(n, truth, seed);
  gssd::Rng rng(seed ^ 0x5bd1e995ULL);
  for (double& v : w) v += err.sample(rng);
  return w;
}

DeconvFit exact_fit(const GssModel& m) { return DeconvFit{m, 0.0}; }

// Direct weighted phase distance with a Simpson rule on 2000 intervals.
double brute_phase_distance(const GssModel& m, const std::vector<double>& w, double tstar) {
  return oracle::simpson(
      [&](double t) {
        std::complex<double> e(0.0, 0.0);
        for (double x : w) e += std::polar(1.0, t * x);
        e /= std::abs(e);
        const std::complex<double> c = gssd::implied_cf(m, t);
        const double r = t / tstar;
        return std::abs(e - c / std::abs(c)) * std::pow(1.0 - r * r, 3);
      },
      -tstar, tstar, 2000);
}

}  // namespace

TEST(EmpiricalSkewness, NoErrorEqualsSampleSkewness) {
  const auto w = gssd::gss_sample(2000, kPi1, 1);
  EXPECT_NEAR(gssd::empirical_skewness_x(w, 0.0), oracle::skewness(w), 1e-12);
}

TEST(EmpiricalSkewness, SymmetricNearZero) {
  const auto w = contaminated(1'000'000, kPi0, ErrorModel::normal(0.2), 2);
  EXPECT_NEAR(gssd::empirical_skewness_x(w, 0.2), 0.0, 0.02);
}

TEST(EmpiricalSkewness, RecoversSignalSkewness) {
  const double target = oracle::gss_skewness([](double z) { return oracle::Phi(9.9625 * z); });
  const ErrorModel err = ErrorModel::normal(0.2 * gssd::model_variance(kPi1));
  const auto w = contaminated(1'000'000, kPi1, err, 3);
  EXPECT_NEAR(gssd::empirical_skewness_x(w, err.variance()), target, 0.03);
}

TEST(EmpiricalSkewness, NegativeSignalVariance) {
  const std::vector<double> w{0.0, 1.0, 2.0, 3.0};
  try {
    gssd::empirical_skewness_x(w, 10.0);
    FAIL();
  } catch (const gssd::Error& e) {
    EXPECT_EQ(e.kind(), gssd::ErrorKind::NegativeSignalVariance);
  }
}

TEST(ImpliedSkewness, ExactModels) {
  EXPECT_NEAR(gssd::implied_skewness(exact_fit(kPi0)), 0.0, 1e-6);
  const double s1 = oracle::gss_skewness([](double z) { return oracle::Phi(9.9625 * z); });
  EXPECT_NEAR(gssd::implied_skewness(exact_fit(kPi1)), s1, 1e-3);
  EXPECT_NEAR(s1, 0.9553, 1e-3);
  const double s2 = oracle::gss_skewness([](double z) { return oracle::Phi(z * z * z - 2.0 * z); });
  EXPECT_NEAR(gssd::implied_skewness(exact_fit(kPi2)), s2, 1e-3);
}

TEST(ImpliedSkewness, LocationScaleInvariant) {
  const GssModel moved(kPi2.skew(), 5.0, 3.0);
  EXPECT_NEAR(gssd::implied_skewness(exact_fit(moved)), gssd::implied_skewness(exact_fit(kPi2)),
              1e-10);
}

TEST(SkewnessSelect, PicksNearestImpliedSkewness) {
  const auto w = gssd::gss_sample(20'000, kPi1, 4);
  const std::vector<DeconvFit> single{exact_fit(kPi0)};
  EXPECT_EQ(gssd::skewness_select(single, w, 0.0).chosen, 0u);

  const GssModel mild(SkewingFunction::probit_scaled(0.3));
  const double g0 = gssd::implied_skewness(exact_fit(mild));
  const double g1 = gssd::implied_skewness(exact_fit(kPi1));
  ASSERT_LT(g0, 0.3);
  ASSERT_GT(g1, 0.9);
  const std::vector<DeconvFit> pair{exact_fit(mild), exact_fit(kPi1)};
  const auto rec = gssd::skewness_select(pair, w, 0.0);
  EXPECT_EQ(rec.chosen, 1u);
  EXPECT_EQ(rec.criterion, SelectionCriterion::Skewness);
  const double target = gssd::empirical_skewness_x(w, 0.0);
  EXPECT_NEAR(rec.scores[0], std::abs(target - g0), 1e-12);
  EXPECT_NEAR(rec.scores[1], std::abs(target - g1), 1e-12);
}

TEST(Argmin, LowestIndexOnTies) {
  EXPECT_EQ(gssd::argmin_score(std::vector<double>{2.0, 1.0, 1.0, 3.0}), 1u);
  EXPECT_THROW(gssd::argmin_score(std::vector<double>{}), gssd::Error);
}

TEST(DefaultTstar, MatchesBruteForceSearch) {
  const auto w = contaminated(400, kPi2, ErrorModel::laplace(0.3), 5);
  const double n = static_cast<double>(w.size());
  const double m = oracle::mean(w);
  const double sd = std::sqrt(oracle::variance(w));
  double expect = 3.0 / sd;
  for (int k = 1; k <= 3000; ++k) {
    const double tau = 0.001 * k;
    std::complex<double> c(0.0, 0.0);
    for (double x : w) c += std::polar(1.0, tau * (x - m) / sd);
    if (std::abs(c) / n < std::pow(n, -0.25)) {
      expect = 0.001 * (k - 1) / sd;
      break;
    }
  }
  EXPECT_NEAR(gssd::default_tstar(w), expect, 1e-9);
}

TEST(DefaultTstar, ScaleEquivariant) {
  auto w = contaminated(300, kPi1, ErrorModel::normal(0.1), 6);
  const double t1 = gssd::default_tstar(w);
  for (double& v : w) v = 4.0 * v - 2.0;
  EXPECT_NEAR(gssd::default_tstar(w), t1 / 4.0, 1e-9);
}

TEST(PhaseDistance, MatchesBruteForceQuadrature) {
  const auto w = contaminated(300, kPi1, ErrorModel::normal(0.1), 7);
  const GssModel alt(kPi2.skew(), 0.2, 0.8);
  for (const auto& m : {kPi1, alt}) {
    const double r = gssd::phase_distance(exact_fit(m), w, 1.5);
    EXPECT_NEAR(r, brute_phase_distance(m, w, 1.5), 2e-4 * std::max(1.0, r));
    EXPECT_GE(r, 0.0);
  }
}

TEST(PhaseDistance, ExactModelSmallAtLargeN) {
  const ErrorModel err = ErrorModel::laplace(0.2 * gssd::model_variance(kPi1));
  const auto w = contaminated(100'000, kPi1, err, 8);
  EXPECT_LT(gssd::phase_distance(exact_fit(kPi1), w, gssd::default_tstar(w)), 0.05);
}

TEST(PhaseDistance, InvariantToErrorFamily) {
  const double var = 0.2 * gssd::model_variance(kPi1);
  double normal_sum = 0.0;
  double laplace_sum = 0.0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const auto wn = contaminated(500, kPi1, ErrorModel::normal(var), 100 + r);
    const auto wl = contaminated(500, kPi1, ErrorModel::laplace(var), 100 + r);
    normal_sum += gssd::phase_distance(exact_fit(kPi1), wn, 1.5);
    laplace_sum += gssd::phase_distance(exact_fit(kPi1), wl, 1.5);
  }
  EXPECT_NEAR(normal_sum / reps, laplace_sum / reps, 0.02);
}

TEST(PhaseDistance, UndefinedPhaseShrinksWindow) {
  // empirical cf of {-1, 1} is cos t, which vanishes at pi/2
  const std::vector<double> w{-1.0, 1.0};
  const gssd::PhaseReference ref(w, M_PI / 2.0);
  EXPECT_LT(ref.tstar(), M_PI / 2.0);
  EXPECT_GT(ref.tstar(), 0.0);
  EXPECT_FALSE(ref.warnings().empty());
  EXPECT_THROW(gssd::PhaseReference(w, -1.0), gssd::Error);
}

TEST(PhaseSelect, PrefersTruthOverMomentMatchedNormal) {
  const ErrorModel err = ErrorModel::laplace(0.2 * gssd::model_variance(kPi1));
  const GssModel normal(SkewingFunction::constant_half(), gssd::model_mean(kPi1),
                        std::sqrt(gssd::model_variance(kPi1)));
  const std::vector<DeconvFit> cands{exact_fit(normal), exact_fit(kPi1)};
  int hits = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto w = contaminated(500, kPi1, err, 300 + r);
    const auto rec = gssd::phase_select(cands, w);
    EXPECT_EQ(rec.scores.size(), 2u);
    EXPECT_EQ(rec.weight_exponent, 3);
    hits += rec.chosen == 1 ? 1 : 0;
  }
  EXPECT_GE(hits, 0.8 * reps);
}

TEST(RandomSelect, DeterministicAndInRange) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = gssd::random_select(3, seed);
    const auto b = gssd::random_select(3, seed);
    EXPECT_EQ(a.chosen, b.chosen);
    EXPECT_LT(a.chosen, 3u);
    EXPECT_EQ(a.scores[a.chosen], 0.0);
  }
  EXPECT_THROW(gssd::random_select(0, 1), gssd::Error);
}

TEST(MinIseSelect, PicksTruth) {
  const std::vector<DeconvFit> cands{exact_fit(kPi0), exact_fit(kPi1), exact_fit(kPi2)};
  const auto rec = gssd::min_ise_select(cands, kPi2);
  EXPECT_EQ(rec.chosen, 2u);
  EXPECT_NEAR(rec.scores[2], 0.0, 1e-12);
}

TEST(SelectionNames, RoundTrip) {
  for (auto c : {SelectionCriterion::Skewness, SelectionCriterion::Phase,
                 SelectionCriterion::MinIse, SelectionCriterion::Random}) {
    EXPECT_EQ(gssd::parse_selection_criterion(gssd::to_string(c)), c);
  }
  EXPECT_EQ(gssd::parse_selection_criterion("phs"), SelectionCriterion::Phase);
  EXPECT_THROW(gssd::parse_selection_criterion("best"), gssd::Error);
}

TEST(Pipeline, SingleSolutionNeedsNoSelection) {
  const auto w = gssd::gss_sample(10'000, kPi0, 31);
  gssd::PipelineConfig cfg;
  cfg.bandwidth = gssd::BandwidthMethod::Plugin;
  const auto res = gssd::run_pipeline(w, ErrorModel::normal(0.0), cfg);
  ASSERT_EQ(res.candidates.size(), 1u);
  EXPECT_EQ(res.selection.chosen, 0u);
  ASSERT_TRUE(res.fit.selection.has_value());
  EXPECT_EQ(res.fit.xi(), res.candidates[0].solution.xi);
}

TEST(Pipeline, CandidateFitsUseStandardizedBandwidths) {
  const ErrorModel err = ErrorModel::normal(0.2 * gssd::model_variance(kPi1));
  const auto w = contaminated(500, kPi1, err, 41);
  const auto res = gssd::run_pipeline(w, err);
  ASSERT_FALSE(res.candidates.empty());
  EXPECT_EQ(res.candidates.size() + res.dropped, res.solutions.size());
  for (const auto& c : res.candidates) {
    std::vector<double> wstar;
    for (double v : w) wstar.push_back((v - c.solution.xi) / c.solution.omega);
    const auto h = gssd::select_bandwidth(gssd::BandwidthMethod::Mise, wstar, err, c.solution.omega);
    EXPECT_DOUBLE_EQ(c.fit.h, h.h);
    const auto direct = gssd::gss_fit(w, c.solution.xi, c.solution.omega, err, h.h);
    for (double x : {-1.0, 0.0, 0.5, 2.0}) EXPECT_DOUBLE_EQ(c.fit.density(x), direct.density(x));
  }
  EXPECT_EQ(res.selection.scores.size(), res.candidates.size());
  EXPECT_EQ(res.selection.criterion, SelectionCriterion::Phase);
  EXPECT_GT(res.selection.tstar, 0.0);
}

TEST(Pipeline, Deterministic) {
  const ErrorModel err = ErrorModel::laplace(0.1);
  const auto w = contaminated(300, kPi2, err, 51);
  gssd::PipelineConfig cfg;
  cfg.selection = SelectionCriterion::Random;
  const auto a = gssd::run_pipeline(w, err, cfg);
  const auto b = gssd::run_pipeline(w, err, cfg);
  EXPECT_EQ(a.selection.chosen, b.selection.chosen);
  EXPECT_EQ(a.fit.h, b.fit.h);
  for (double x = -3.0; x <= 3.0; x += 0.25) EXPECT_EQ(a.fit.density(x), b.fit.density(x));
}

TEST(Pipeline, ConfigErrors) {
  const ErrorModel err = ErrorModel::normal(0.1);
  const auto w = contaminated(300, kPi1, err, 61);
  gssd::PipelineConfig cfg;
  cfg.selection = SelectionCriterion::MinIse;
  try {
    gssd::run_pipeline(w, err, cfg);
    FAIL();
  } catch (const gssd::Error& e) {
    EXPECT_EQ(e.kind(), gssd::ErrorKind::Config);
  }
  EXPECT_NO_THROW(gssd::run_pipeline(w, err, cfg, &kPi1));
  gssd::PipelineConfig bad;
  bad.moments = 7;
  EXPECT_THROW(gssd::run_pipeline(w, err, bad), gssd::Error);
  EXPECT_THROW(gssd::run_pipeline(std::vector<double>(5, 1.0), err), gssd::Error);
}

// The two checks below state the selection-accuracy properties with fitted
// candidates, as the pipeline produces them.

TEST(SelectionProperties, PhaseFindsTruthAmongFittedCandidates) {
  const ErrorModel err = ErrorModel::laplace(0.2 * gssd::model_variance(kPi1));
  const gssd::PipelineConfig cfg;
  const gssd::GmmSolution truth{0.0, 1.0, 0.0, true, 0, 1};
  const gssd::GmmSolution spurious{0.8, 0.62, 0.0, true, 1, 1};
  int hits = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto w = contaminated(500, kPi1, err, 900 + r);
    const std::vector<DeconvFit> fits{gssd::fit_candidate(w, err, truth, cfg).fit,
                                      gssd::fit_candidate(w, err, spurious, cfg).fit};
    hits += gssd::phase_select(fits, w).chosen == 0 ? 1 : 0;
  }
  EXPECT_GT(hits, 0.9 * reps) << "true-parameter fit chosen in " << hits << " of " << reps;
}

TEST(SelectionProperties, AgreementWithMinIse) {
  const ErrorModel err = ErrorModel::normal(0.2 * gssd::model_variance(kPi1));
  int phase = 0;
  int skew = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const auto w = contaminated(500, kPi1, err, 1200 + r);
    const auto res = gssd::run_pipeline(w, err);
    std::vector<DeconvFit> fits;
    for (const auto& c : res.candidates) fits.push_back(c.fit);
    const auto best = gssd::min_ise_select(fits, kPi1).chosen;
    phase += res.selection.chosen == best ? 1 : 0;
    skew += gssd::skewness_select(fits, w, err.variance()).chosen == best ? 1 : 0;
  }
  EXPECT_GE(phase, 0.6 * reps) << "phase agreed in " << phase << " of " << reps;
  EXPECT_GE(skew, 0.6 * reps) << "skewness agreed in " << skew << " of " << reps;
}
