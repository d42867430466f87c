// Acceptance runner: one PASS/FAIL line per criterion.
//   gssdecon_acceptance [--criterion N]...

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <unistd.h>
#include <string>
#include <vector>

#include "../unit/oracles.hpp"
#include "gssdecon/errors.hpp"
#include "gssdecon/estimator.hpp"
#include "gssdecon/gmm.hpp"
#include "gssdecon/gss.hpp"
#include "gssdecon/harness.hpp"
#include "gssdecon/selection.hpp"
#include "gssdecon/spectral.hpp"

using namespace gssd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void note(const std::string& s) { std::cout << "    " << s << '\n' << std::flush; }

/// Streaming mean and variance.
struct Welford {
  double n = 0.0, mean = 0.0, m2 = 0.0;
  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double var() const { return m2 / (n - 1.0); }
  double se() const { return std::sqrt(var() / n); }
};

SimConfig base_config(StudyKind study, std::vector<SimCell> cells) {
  SimConfig cfg;
  cfg.study = study;
  cfg.cells = std::move(cells);
  cfg.replicates = 200;
  cfg.seed = 20240601;
  cfg.threads = 0;
  return cfg;
}

double median_of(const CellResult& c, const std::string& col) {
  const auto it = c.ise100.find(col);
  return it == c.ise100.end() ? std::nan("") : it->second.median;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  const SimResult r = run_table1(
      base_config(StudyKind::Table1, {{TruthKind::Pi1, ErrorFamily::Normal, 0.2, 200}}));
  const auto& c = r.cells.front();
  const double m2 = c.rmse.at("xi_M2");
  const double m5 = c.rmse.at("xi_M5");
  const bool pass = m2 >= 0.10 && m2 <= 0.17 && m5 >= 0.07 && m5 <= 0.12 && m5 < m2;
  return {pass, fmt("pi1 n=200 N0.2, 200 reps: RMSE(xi) M2=%.4f in [0.10,0.17], M5=%.4f in "
                    "[0.07,0.12], M5<M2 (failed reps %zu)",
                    m2, m5, c.failures)};
}

Outcome criterion2() {
  std::vector<SimCell> cells;
  for (auto fam : {ErrorFamily::Normal, ErrorFamily::Laplace}) {
    for (double nsr : {0.2, 0.5}) cells.push_back({TruthKind::Pi0, fam, nsr, 200});
  }
  const SimResult r = run_table1(base_config(StudyKind::Table1, cells));
  double total = 0.0;
  std::string per;
  for (const auto& c : r.cells) {
    const double a = c.rmse.at("omega_M2");
    const double b = c.rmse.at("omega_M5");
    const double inc = b / a - 1.0;
    total += inc;
    note(fmt("%s: RMSE(omega) M2=%.4f M5=%.4f change %+.1f%%", c.cell.label().c_str(), a, b,
             100.0 * inc));
    per += fmt(" %+.1f%%", 100.0 * inc);
  }
  const double avg = total / static_cast<double>(r.cells.size());
  return {avg < 0.25, fmt("pi0 n=200 x4, 200 reps: mean RMSE(omega) increase M2->M5 %+.1f%% < "
                          "25%% (per config:%s)",
                          100.0 * avg, per.c_str())};
}

Outcome criterion3() {
  const SimResult r = run_table2(
      base_config(StudyKind::Table2, {{TruthKind::Pi0, ErrorFamily::Normal, 0.2, 500}}));
  const auto& c = r.cells.front();
  const double g = median_of(c, "gss");
  const double np = median_of(c, "np");
  const double ratio = g / np;
  return {ratio < 0.5, fmt("pi0 n=500 N0.2, 200 reps: median 100*ISE GSS=%.4f NP=%.4f ratio "
                           "%.3f < 0.5 (failed reps %zu)",
                           g, np, ratio, c.failures)};
}

Outcome criterion4() {
  SimConfig cfg =
      base_config(StudyKind::Selection, {{TruthKind::Pi1, ErrorFamily::Laplace, 0.5, 500}});
  cfg.bandwidths = {BandwidthMethod::Mise};
  cfg.selections = {SelectionCriterion::Phase};
  cfg.nonparametric = true;
  const SimResult r = run_selection_tables(cfg);
  const auto& c = r.cells.front();
  const double g = median_of(c, "mise_phase");
  const double np = median_of(c, "np");
  const bool pass = g >= 0.8 && g <= 1.4 && g < np;
  return {pass, fmt("pi1 n=500 L0.5, MISE+phase, 200 reps: median 100*ISE %.4f in [0.8,1.4], "
                    "NP %.4f (failed reps %zu)",
                    g, np, c.failures)};
}

Outcome criterion5() {
  const SimResult r = run_table2(
      base_config(StudyKind::Table2, {{TruthKind::Pi2, ErrorFamily::Laplace, 0.5, 200}}));
  const auto& c = r.cells.front();
  const double g = median_of(c, "gss");
  const double np = median_of(c, "np");
  const bool pass = std::isfinite(g) && std::isfinite(np);
  return {pass, fmt("pi2 n=200 L0.5, 200 reps: reported, median 100*ISE GSS=%.4f NP=%.4f, "
                    "reversal %s (failed reps %zu)",
                    g, np, np < g ? "present" : "absent", c.failures)};
}

Outcome criterion6() {
  const SimCell cell{TruthKind::Pi1, ErrorFamily::Normal, 0.2, 200};
  const ErrorModel err = cell.error();
  const double h = 0.2, t1 = 0.5, t2 = 1.0;
  const std::size_t reps = 2000;
  std::vector<double> a(reps), b(reps);
  parallel_for(reps, resolve_threads(0), [&](std::size_t r) {
    const auto w = simulate_replicate(cell, 6060, r);
    a[r] = s0_smoothed(t1, w, err, 1.0, h);
    b[r] = s0_smoothed(t2, w, err, 1.0, h);
  });
  const double ma = oracle::mean(a), mb = oracle::mean(b);
  Welford prod;
  for (std::size_t r = 0; r < reps; ++r) prod.add((a[r] - ma) * (b[r] - mb));
  const double cov = prod.mean * reps / (reps - 1.0);

  const double slope = kSharpProbitSlope;
  auto pi = [&](double z) { return oracle::Phi(slope * z); };
  auto s0 = [&](double t) { return oracle::gss_s0(pi, t); };
  auto c0 = [](double t) { return std::exp(-0.5 * t * t); };
  auto psiU = [&](double t) { return std::exp(-0.5 * err.variance() * t * t); };
  auto psiK = [](double t) { return std::pow(1.0 - t * t, 3); };
  const double n = static_cast<double>(cell.n);
  const double expected =
      psiK(h * t1) * psiK(h * t2) / n *
      ((c0(t1 - t2) * psiU(t1 - t2) - c0(t1 + t2) * psiU(t1 + t2)) / (2.0 * psiU(t1) * psiU(t2)) -
       s0(t1) * s0(t2));
  const double z = (cov - expected) / prod.se();
  return {std::abs(z) <= 4.0,
          fmt("Cov(s0(0.5), s0(1.0)), h=0.2, 2000 reps: MC %.6g vs formula %.6g, %.2f SE "
              "(limit 4)",
              cov, expected, z)};
}

Outcome criterion7() {
  const GssModel truth = truth_model(TruthKind::Pi1);
  const double xi = 0.3, omega = 1.4;
  bool pass = true;
  std::string summary;
  for (auto fam : {ErrorFamily::Normal, ErrorFamily::Laplace}) {
    const ErrorModel err(fam, 0.4);
    const MomentSpec spec(5, err);
    // Single-draw moments, 10^7 draws.
    Rng rng(split_seed(7070, static_cast<std::uint64_t>(fam)));
    Welford t[4];
    for (long i = 0; i < 10'000'000; ++i) {
      const double w = xi + omega * gss_draw(truth, rng) + err.sample(rng);
      const double s = (w - xi) / omega;
      const double s2 = s * s;
      t[1].add(s2);
      t[2].add(s2 * s2);
      t[3].add(s2 * s2 * s2);
    }
    double worst = 0.0;
    for (int k = 1; k <= 3; ++k) {
      const double z = (t[k].mean - t_mean(k, spec, omega)) / t[k].se();
      note(fmt("%s E[T_%d]: MC %.6f vs %.6f, %+.2f SE", to_string(fam), k, t[k].mean,
               t_mean(k, spec, omega), z));
      worst = std::max(worst, std::abs(z));
    }
    pass = pass && worst <= 3.0;

    // Products of sample moments over samples of size n.
    const std::size_t n = 20, reps = 200'000;
    const std::pair<int, int> pairs[] = {{1, 1}, {1, 2}, {2, 2}, {1, 3}};
    Welford prod[4];
    for (std::size_t r = 0; r < reps; ++r) {
      double sums[4] = {0, 0, 0, 0};
      for (std::size_t j = 0; j < n; ++j) {
        const double s = omega * gss_draw(truth, rng) + err.sample(rng);
        const double s2 = (s / omega) * (s / omega);
        sums[1] += s2;
        sums[2] += s2 * s2;
        sums[3] += s2 * s2 * s2;
      }
      for (int p = 0; p < 4; ++p) {
        prod[p].add(sums[pairs[p].first] / n * sums[pairs[p].second] / n);
      }
    }
    double worst_pair = 0.0;
    const double nd = static_cast<double>(n);
    for (int p = 0; p < 4; ++p) {
      const auto [i, k] = pairs[p];
      const double e = t_mean(i + k, spec, omega) / nd +
                       (nd - 1.0) / nd * t_mean(i, spec, omega) * t_mean(k, spec, omega);
      const double z = (prod[p].mean - e) / prod[p].se();
      note(fmt("%s E[T_%d T_%d] (n=20): MC %.6f vs %.6f, %+.2f SE", to_string(fam), i, k,
               prod[p].mean, e, z));
      worst_pair = std::max(worst_pair, std::abs(z));
    }
    pass = pass && worst_pair <= 4.0;
    summary += fmt(" %s max|z| moments %.2f, products %.2f;", to_string(fam), worst, worst_pair);
  }
  return {pass, "t_mean vs 1e7 draws (limit 3 SE), E[T_i T_k] identity (limit 4 SE):" + summary};
}

// Property suite ------------------------------------------------------------

bool check_reflection(std::string& detail) {
  const SimCell cell{TruthKind::Pi1, ErrorFamily::Normal, 0.2, 500};
  const auto w = simulate_replicate(cell, 8080, 0);
  const PipelineResult r = run_pipeline(w, cell.error(), PipelineConfig{});
  const auto& skew = r.fit.model.skew();
  const ZGrid zg{};
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(-9.0, 9.0);
  std::vector<double> zs;
  for (std::size_t i = 0; i < zg.points; ++i) zs.push_back(zg.z(i));
  for (int i = 0; i < 2000; ++i) zs.push_back(u(rng));
  std::size_t bad_range = 0, bad_sum = 0;
  for (double z : zs) {
    const double p = skew(z), q = skew(-z);
    if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) ++bad_range;
    if (p + q != 1.0) ++bad_sum;
  }
  detail = fmt("%zu points, out of range %zu, pi(z)+pi(-z)!=1 %zu", zs.size(), bad_range, bad_sum);
  return bad_range == 0 && bad_sum == 0;
}

bool check_mass(std::string& detail) {
  double worst = 0.0;
  for (auto kind : {TruthKind::Pi0, TruthKind::Pi1, TruthKind::Pi2}) {
    const SimCell cell{kind, ErrorFamily::Laplace, 0.5, 500};
    const auto w = simulate_replicate(cell, 8181, 0);
    const DeconvFit fit = run_pipeline(w, cell.error(), PipelineConfig{}).fit;
    const double lo = fit.xi() - 12.0 * fit.omega(), hi = fit.xi() + 12.0 * fit.omega();
    const double mass = oracle::simpson([&](double x) { return fit.density(x); }, lo, hi, 48000);
    worst = std::max(worst, std::abs(mass - 1.0));
  }
  detail = fmt("max |mass - 1| = %.2e over 3 fits (limit 1e-4)", worst);
  return worst <= 1e-4;
}

bool check_odd(std::string& detail) {
  std::mt19937_64 rng(82);
  std::normal_distribution<double> nd(0.7, 1.3);
  std::vector<double> w(300);
  for (double& v : w) v = nd(rng);
  const ErrorModel err = ErrorModel::laplace(0.3);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  std::size_t bad = 0;
  for (int i = 0; i < 50; ++i) {
    const double t = u(rng);
    if (s0_smoothed(-t, w, err, 1.1, 0.15) != -s0_smoothed(t, w, err, 1.1, 0.15)) ++bad;
    if (s0_empirical(-t, w, err, 1.1) != -s0_empirical(t, w, err, 1.1)) ++bad;
  }
  detail = fmt("50 random t, asymmetric pairs %zu", bad);
  return bad == 0;
}

bool check_parseval(std::string& detail) {
  const SimCell cell{TruthKind::Pi1, ErrorFamily::Normal, 0.2, 500};
  const auto w = simulate_replicate(cell, 8282, 0);
  const GssModel truth = truth_model(cell.truth);
  const double h = 0.2;
  const ZGrid zg{8.0, 3201};
  const SkewEstimator est(w, 0.0, 1.0, cell.error(), 1.0 / h, zg);

  // Density side: f~ - f = 2 phi(z)(pi^ - pi), odd in z.
  const auto raw = est.raw_table(h);
  std::vector<double> sq(zg.points);
  for (std::size_t i = 0; i < zg.points; ++i) {
    const double z = zg.z(i);
    const double d = 2.0 * oracle::phi(z) * (raw[i] - truth.skew()(z));
    sq[i] = d * d;
  }
  const double dz = zg.z(1);
  double x_side = 0.0;
  for (std::size_t i = 0; i + 1 < sq.size(); ++i) x_side += 0.5 * dz * (sq[i] + sq[i + 1]);
  x_side *= 2.0;

  // Frequency side: (2 pi)^-1 over R = pi^-1 over t >= 0.
  const auto s0hat = est.s0_on_grid(h);
  const auto& spec = est.spectrum();
  std::vector<double> fsq(s0hat.size());
  for (std::size_t k = 0; k < s0hat.size(); ++k) {
    const double d = s0hat[k] - standardized_cf(truth, spec.t(k)).imag();
    fsq[k] = d * d;
  }
  double t_side = 0.0;
  for (std::size_t k = 0; k + 1 < fsq.size(); ++k) t_side += 0.5 * spec.dt() * (fsq[k] + fsq[k + 1]);
  t_side += oracle::simpson(
      [&](double t) {
        const double s = standardized_cf(truth, t).imag();
        return s * s;
      },
      spec.t_max(), 80.0, 4000);
  t_side /= M_PI;
  const double rel = std::abs(x_side / t_side - 1.0);
  detail = fmt("x-space %.6e vs t-space %.6e, relative gap %.2e (limit 0.02)", x_side, t_side, rel);
  return rel <= 0.02;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = oracle::mean(x), my = oracle::mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

bool check_bias_slope(std::string& detail) {
  const std::vector<double> hs{0.8, 0.4, 0.2, 0.1};
  const std::size_t reps = 5000, n = 10'000;
  const ErrorModel none = ErrorModel::normal(0.0);
  bool pass = true;
  detail.clear();
  for (auto kind : {TruthKind::Pi1, TruthKind::Pi2}) {
    const GssModel truth = truth_model(kind);
    std::vector<std::vector<double>> est(hs.size(), std::vector<double>(reps));
    parallel_for(reps, resolve_threads(0), [&](std::size_t r) {
      const auto w = gss_sample(n, truth, split_seed(9090 + static_cast<int>(kind), r));
      const SkewEstimator e(w, 0.0, 1.0, none, 1.0 / hs.back(), ZGrid{1.0, 2});
      for (std::size_t j = 0; j < hs.size(); ++j) est[j][r] = e.raw_table(hs[j])[1];
    });
    std::vector<double> lx, ly;
    std::string bias_list, exact_list;
    std::vector<double> ey;
    for (std::size_t j = 0; j < hs.size(); ++j) {
      const double bias = oracle::mean(est[j]) - truth.skew()(1.0);
      const double se = std::sqrt(oracle::variance(est[j]) / reps);
      // E pi^(1) = 1/2 + (2 pi phi(1))^-1 int_0^{1/h} sin(t) psi_K(ht) s0(t) dt
      const double h = hs[j];
      const double exact =
          0.5 +
          oracle::simpson(
              [&](double t) {
                return std::sin(t) * SmoothingKernelCF{}(h * t) * standardized_cf(truth, t).imag();
              },
              0.0, 1.0 / h, 2000) /
              (2.0 * M_PI * oracle::phi(1.0)) -
          truth.skew()(1.0);
      lx.push_back(std::log(h));
      ly.push_back(std::log(std::abs(bias)));
      ey.push_back(std::log(std::abs(exact)));
      bias_list += fmt(" %.3g(%.1g)", bias, se);
      exact_list += fmt(" %.3g", exact);
    }
    const double slope = ls_slope(lx, ly);
    const double exact_slope = ls_slope(lx, ey);
    note(fmt("bias %s at h=0.8,0.4,0.2,0.1, MC mean (SE):%s; exact:%s", to_string(kind),
             bias_list.c_str(), exact_list.c_str()));
    detail += fmt("%s slope %.2f (exact %.2f); ", to_string(kind), slope, exact_slope);
    pass = pass && std::abs(slope - 2.0) <= 0.3;
  }
  detail += "target 2.0 +- 0.3";
  return pass;
}

bool check_equivariance(std::string& detail) {
  const SimCell cell{TruthKind::Pi1, ErrorFamily::Laplace, 0.2, 500};
  const ErrorModel err = cell.error();
  const auto w = simulate_replicate(cell, 8383, 0);
  const auto base = gmm_solve(w, MomentSpec(5, err));
  const double a = -1.7, b = 2.5;
  std::vector<double> moved(w);
  for (double& v : moved) v = a + b * v;
  const auto out = gmm_solve(moved, MomentSpec(5, err.scaled(b)));
  if (out.size() != base.size()) {
    detail = fmt("solution counts differ: %zu vs %zu", base.size(), out.size());
    return false;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    worst = std::max(worst, std::abs(out[i].xi - (a + b * base[i].xi)) / b);
    worst = std::max(worst, std::abs(out[i].omega / b - base[i].omega));
  }
  detail = fmt("%zu solutions under x -> -1.7 + 2.5x, max deviation %.2e (limit 1e-4)",
               base.size(), worst);
  return worst <= 1e-4;
}

bool check_sampler(std::string& detail) {
  double min_p = 1.0;
  const int bins = 50;
  for (auto kind : {TruthKind::Pi0, TruthKind::Pi1, TruthKind::Pi2}) {
    const GssModel m(truth_model(kind).skew(), 0.5, 2.0);
    const auto x = gss_sample(100'000, m, split_seed(8484, static_cast<int>(kind)));
    // Equiprobable bins from the model CDF, cumulated by Simpson on a fine grid.
    const double lo = m.xi() - 12.0 * m.omega(), step = 24.0 * m.omega() / 48000.0;
    std::vector<double> edges;
    double cdf = 0.0;
    int next = 1;
    for (int i = 0; i < 48000 && next < bins; ++i) {
      const double a = lo + i * step;
      cdf += oracle::simpson([&](double v) { return m.pdf(v); }, a, a + step, 4);
      while (next < bins && cdf >= static_cast<double>(next) / bins) {
        edges.push_back(a + step);
        ++next;
      }
    }
    std::vector<double> counts(bins, 0.0);
    for (double v : x) {
      counts[std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()] += 1.0;
    }
    const double e = static_cast<double>(x.size()) / bins;
    double stat = 0.0;
    for (double c : counts) stat += (c - e) * (c - e) / e;
    const boost::math::chi_squared_distribution<double> chi(bins - 1);
    const double p = boost::math::cdf(boost::math::complement(chi, stat));
    note(fmt("sampler %s: chi2 %.1f on %d df, p = %.3f", to_string(kind), stat, bins - 1, p));
    min_p = std::min(min_p, p);
  }
  detail = fmt("3 truths, 1e5 draws, 50 equiprobable bins, min p %.3f (level 0.01)", min_p);
  return min_p > 0.01;
}

Outcome criterion8() {
  const std::pair<const char*, std::function<bool(std::string&)>> checks[] = {
      {"reflection", check_reflection},     {"mass", check_mass},
      {"odd s0", check_odd},                {"Parseval", check_parseval},
      {"bias slope", check_bias_slope},     {"GMM equivariance", check_equivariance},
      {"sampler GOF", check_sampler},
  };
  bool pass = true;
  std::string failed;
  for (const auto& [name, fn] : checks) {
    std::string detail;
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("error: ") + e.what();
    }
    note(fmt("%s %s: %s", ok ? "ok  " : "FAIL", name, detail.c_str()));
    if (!ok) failed += std::string(failed.empty() ? "" : ", ") + name;
    pass = pass && ok;
  }
  return {pass, pass ? "7 properties hold" : "failing: " + failed};
}

// CLI determinism ------------------------------------------------------------

int run_in(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" GSSDECON_CLI_PATH "' " + args +
                          " > stdout.txt 2> stderr.txt";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion9() {
  const fs::path root = fs::temp_directory_path() / fs::path("gssdecon_acceptance_" +
                                                             std::to_string(::getpid()));
  fs::remove_all(root);
  const SimCell cell{TruthKind::Pi1, ErrorFamily::Laplace, 0.5, 300};
  const auto w = simulate_replicate(cell, 9191, 0);
  std::string csv = "w\n";
  for (double v : w) csv += fmt("%.17g\n", v);
  const std::string config = R"({"study": "selection", "truths": ["pi1"], "errors": ["L"],
    "nsrs": [0.5], "ns": [200], "replicates": 4, "seed": 77,
    "selections": ["minise", "phase", "skewness", "random"]})";
  const std::string dec = fmt(
      "deconvolve --input data.csv --error laplace --error-var %.17g --select random --seed 5 "
      "--nonparametric --threads 1",
      cell.error().variance());
  const std::string sim = "simulate --config config.json --threads 2";

  std::vector<std::string> runs[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = root / ("run" + std::to_string(k));
    fs::create_directories(dir);
    std::ofstream(dir / "data.csv") << csv;
    std::ofstream(dir / "config.json") << config;
    if (run_in(dir, dec) != 0 || run_in(dir, sim) != 0) {
      return {false, "CLI run failed: " + slurp(dir / "stderr.txt")};
    }
  }
  const char* files[] = {"gssdecon_report.json", "gssdecon_density.csv", "gssdecon_sim.json",
                         "gssdecon_sim.csv"};
  bool same = true;
  std::string detail;
  std::size_t bytes = 0;
  for (const char* f : files) {
    const std::string a = slurp(root / "run0" / f), b = slurp(root / "run1" / f);
    bytes += a.size();
    if (a.empty() || a != b) {
      same = false;
      detail += fmt(" %s differs;", f);
    }
  }
  fs::remove_all(root);
  return {same, same ? fmt("deconvolve + simulate rerun: 4 output files byte-identical (%zu bytes)",
                           bytes)
                     : "outputs differ:" + detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::function<Outcome()> criteria[] = {criterion1, criterion2, criterion3,
                                               criterion4, criterion5, criterion6,
                                               criterion7, criterion8, criterion9};
  std::vector<int> chosen;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      const int k = std::atoi(argv[++i]);
      if (k < 1 || k > 9) {
        std::cerr << "criterion must be 1..9\n";
        return 2;
      }
      chosen.push_back(k);
    } else {
      std::cerr << "usage: gssdecon_acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (chosen.empty()) {
    for (int k = 1; k <= 9; ++k) chosen.push_back(k);
  }
  int failed = 0;
  for (int k : chosen) {
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << " | " << o.detail
              << '\n'
              << std::flush;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
