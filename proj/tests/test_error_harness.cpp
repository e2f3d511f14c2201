#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "levydc/error_harness.hpp"
#include "oracles.hpp"

using namespace levydc;

namespace {

PathRecord path(std::vector<double> t, std::vector<double> x, std::uint64_t id = 1) {
  PathRecord p;
  p.trajectory_id = id;
  p.times = std::move(t);
  p.values = std::move(x);
  return p;
}

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.alphas = {1.5};
  c.benchmark_k = 9;
  c.coarse_ks = {5, 6, 7};
  c.ps = {2, 4};
  c.loops = 3;
  c.trajectories = 4;
  c.seed = 77;
  return c;
}

// DC total small-jump variance over [0, 1] by plain quadrature, and the matching h by bisection
// in log10 h.
double oracle_h(double alpha) {
  TruncatedStableModel m(alpha);
  const double target = 2.0 * std::pow(0.01, 2.0 - alpha) / (2.0 - alpha);
  auto total = [&](double lh) {
    const double h = std::pow(10.0, lh);
    auto rate = [&](double s) {
      const double r = std::pow(s * h, 0.1) / (alpha + std::pow(s * h, 0.1));
      return 2.0 * std::pow(r, (2.0 - alpha) / alpha) / (2.0 - alpha);
    };
    return oracle::simpson_from_zero(rate, 1.0, 1e-30, 1e-14) - target;
  };
  return std::pow(10.0, oracle::bisect(total, -60.0, 0.0, 80));
}

}  // namespace

TEST(StrongError, IdenticalPathsGiveZero) {
  const PathRecord a = path({0, 0.5, 1}, {0, 1, -1});
  EXPECT_EQ(strong_error(a, a), 0.0);
}

TEST(StrongError, ShiftedPath) {
  const PathRecord a = path({0, 0.25, 0.5, 1}, {0, 1, -1, 2});
  const PathRecord b = path({0, 0.25, 0.5, 1}, {0.3, 1.3, -0.7, 2.3});
  EXPECT_NEAR(strong_error(a, b), 0.3, 1e-15);
}

TEST(StrongError, UnionGridHandComputed) {
  // a: 0 on [0, .5), 2 on [.5, 1), 1 at 1.  b: 0 on [0, .3), 1 on [.3, .8), 3 on [.8, 1].
  const PathRecord a = path({0, 0.5, 1}, {0, 2, 1});
  const PathRecord b = path({0, 0.3, 0.8, 1}, {0, 1, 3, 3});
  // Differences on the union grid {0, .3, .5, .8, 1}: 0, 1, 1, 1, 2.
  EXPECT_EQ(strong_error(a, b), 2.0);
  EXPECT_EQ(strong_error(b, a), 2.0);
}

TEST(StrongError, MismatchedTrajectoryThrows) {
  EXPECT_THROW(strong_error(path({0, 1}, {0, 1}, 1), path({0, 1}, {0, 1}, 2)), coupling_error);
}

TEST(EstimateLp, ConstantSamples) {
  const std::vector<double> s(10, 0.7);
  for (double p : {2.0, 4.0, 10.0}) EXPECT_NEAR(estimate_lp(s, p).estimate, 0.7, 1e-15);
}

TEST(EstimateLp, TwoPointFormulas) {
  const std::vector<double> s{0.0, 2.0};
  for (double p : {2.0, 3.0, 8.0}) EXPECT_NEAR(estimate_lp(s, p).estimate, std::pow(std::pow(2.0, p) / 2.0, 1.0 / p), 1e-14);
  EXPECT_NEAR(estimate_lp(std::vector<double>{3.0, 4.0}, 2.0).estimate, std::sqrt(12.5), 1e-15);
}

TEST(EstimateLp, RejectsBadInput) {
  EXPECT_THROW(estimate_lp(std::vector<double>{}, 2.0), domain_error);
  EXPECT_THROW(estimate_lp(std::vector<double>{1.0}, 1.0), domain_error);
}

TEST(EstimateLp, MonotoneInP) {
  Engine rng = SeedNode(1).engine();
  std::exponential_distribution<double> e;
  std::vector<double> s(500);
  for (auto& v : s) v = e(rng);
  double prev = 0.0;
  for (double p = 1.5; p <= 12.0; p += 0.5) {
    const double v = estimate_lp(s, p).estimate;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(BatchMean, MeanAndStandardError) {
  const MeanSe r = batch_mean(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(r.mean, 2.5);
  EXPECT_NEAR(r.stderr_, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
}

TEST(VarianceMatch, AlphaHalfReproducesThreeFigures) {
  const double h = h_for_variance_match(TruncatedStableModel(0.5), 0.1, 0.01);
  EXPECT_NEAR(h / 6.810e-13, 1.0, 5e-4);
}

TEST(VarianceMatch, AgreesWithOracle) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const double h = h_for_variance_match(TruncatedStableModel(alpha), 0.1, 0.01);
    EXPECT_NEAR(h / oracle_h(alpha), 1.0, 1e-5) << "alpha=" << alpha;
  }
}

TEST(VarianceMatch, PinnedValues) {
  EXPECT_NEAR(h_for_variance_match(TruncatedStableModel(0.5), 0.1, 0.01) / 6.80856187652847e-13, 1.0, 2e-6);
  EXPECT_NEAR(h_for_variance_match(TruncatedStableModel(1.0), 0.1, 0.01) / 2.87036658322034e-20, 1.0, 2e-6);
  EXPECT_NEAR(h_for_variance_match(TruncatedStableModel(1.5), 0.1, 0.01) / 1.55774728900600e-28, 1.0, 2e-6);
}

TEST(VarianceMatch, MatchedVariancesAgree) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    TruncatedStableModel m(alpha);
    const double h = h_for_variance_match(m, 0.1, 0.01);
    const double ar = ar_small_jump_variance(ArParams{0.01, 1.0}, m);
    EXPECT_NEAR(dc_total_small_variance(m, 0.1, h, 1.0) / ar, 1.0, 1e-5);
  }
}

TEST(VarianceMatch, RejectsBadEpsilons) {
  TruncatedStableModel m(1.0);
  EXPECT_THROW(h_for_variance_match(m, 0.0, 0.01), domain_error);
  EXPECT_THROW(h_for_variance_match(m, 0.1, 1.0), domain_error);
}

TEST(PowerLawFit, ExactAndConstant) {
  std::vector<double> ns, e1, e2;
  for (int k = 5; k <= 12; ++k) {
    ns.push_back(std::pow(2.0, k));
    e1.push_back(0.4 * std::pow(2.0, -0.5 * k));
    e2.push_back(0.3);
  }
  EXPECT_NEAR(fit_power_law(ns, e1).slope, -0.5, 1e-12);
  EXPECT_NEAR(fit_power_law(ns, e2).slope, 0.0, 1e-12);
}

TEST(PowerLawFit, SkipsNonpositiveErrors) {
  const std::vector<double> ns{2, 4, 8, 16}, e{0.5, 0.0, 0.125, 1.0 / 16};
  EXPECT_NEAR(fit_power_law(ns, e).slope, -1.0, 1e-12);
}

TEST(ConvergenceFit, NoisyPowerLawWithinInterval) {
  const std::vector<unsigned> ks{8, 9, 10, 11, 12};
  Engine rng = SeedNode(5).engine();
  std::normal_distribution<double> z;
  std::vector<std::vector<double>> est(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i)
    for (int l = 0; l < 30; ++l) est[i].push_back(std::pow(2.0, -0.5 * ks[i]) * std::exp(0.1 * z(rng)));
  const ConvergenceFit f = fit_convergence_order(ks, est, 3);
  EXPECT_LE(f.ci_low, -0.5);
  EXPECT_GE(f.ci_high, -0.5);
  EXPECT_NEAR(f.slope, -0.5, 0.05);
}

TEST(ConvergenceFit, NeedsThreeResolutions) {
  const std::vector<unsigned> ks{8, 9};
  const std::vector<std::vector<double>> est{{1.0, 1.0}, {0.5, 0.5}};
  EXPECT_THROW(fit_convergence_order(ks, est, 1), domain_error);
}

TEST(TheoreticalRate, SchemeTwo) { EXPECT_NEAR(theoretical_rate(2, 1.5, 2.0), 5.0 / 12.0, 1e-15); }

TEST(ExperimentConfig, Validation) {
  ExperimentConfig c = tiny_config();
  EXPECT_NO_THROW(c.validate());
  c.coarse_ks = {9};
  EXPECT_THROW(c.validate(), domain_error);
  c = tiny_config();
  c.scheme = 1;
  c.ps = {1.2};
  EXPECT_THROW(c.validate(), domain_error);
  c = tiny_config();
  c.ps = {1.0};
  EXPECT_THROW(c.validate(), domain_error);
}

TEST(Comparison, SwappingMethodsNegatesDifferences) {
  ExperimentConfig a = tiny_config();
  ExperimentConfig b = a;
  b.methods = {Method::dc, Method::ar};
  const ErrorTable ta = run_comparison(a), tb = run_comparison(b);
  ASSERT_EQ(ta.differences.size(), tb.differences.size());
  for (std::size_t i = 0; i < ta.differences.size(); ++i) EXPECT_EQ(ta.differences[i].difference, -tb.differences[i].difference);
}

TEST(Comparison, SelfComparisonIsZero) {
  ExperimentConfig a = tiny_config();
  a.methods = {Method::dc, Method::dc};
  for (const auto& d : run_comparison(a).differences) EXPECT_EQ(d.difference, 0.0);
}

TEST(Comparison, IndependentOfJobCount) {
  const ExperimentConfig a = tiny_config();
  const ErrorTable t1 = run_comparison(a, 1), t3 = run_comparison(a, 3);
  ASSERT_EQ(t1.rows.size(), t3.rows.size());
  for (std::size_t i = 0; i < t1.rows.size(); ++i) {
    EXPECT_EQ(t1.rows[i].error, t3.rows[i].error);
    EXPECT_EQ(t1.rows[i].stderr_, t3.rows[i].stderr_);
    EXPECT_GE(t1.rows[i].error, 0.0);
    EXPECT_TRUE(std::isfinite(t1.rows[i].stderr_));
  }
}

TEST(Comparison, SingleMethodHasNoDifferences) {
  ExperimentConfig a = tiny_config();
  a.methods = {Method::ar};
  const ErrorTable t = run_comparison(a);
  EXPECT_TRUE(t.differences.empty());
  EXPECT_EQ(t.rows.size(), 3u * 2u);
}
