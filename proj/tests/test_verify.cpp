#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "smlab/errors.hpp"
#include "smlab/limits.hpp"
#include "smlab/verify.hpp"

using namespace smlab;

namespace {

// Normal quantile by bisection on the library-independent erfc.
double normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool check_passed(const VerificationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c.passed;
  ADD_FAILURE() << "no check named " << name;
  return false;
}

}  // namespace

TEST(Ks, SingleSampleWithGateDisabled) {
  const std::vector<double> one = {0.5};
  EXPECT_DOUBLE_EQ(ks_statistic(one, Cdf::uniform(0.0, 1.0), false).statistic, 0.5);
  try {
    ks_statistic(one, Cdf::uniform(0.0, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewSamples);
  }
}

TEST(Ks, ExactQuantilesGiveHalfStep) {
  const int n = 1000;
  std::vector<double> xs;
  for (int i = 1; i <= n; ++i) xs.push_back(normal_quantile((i - 0.5) / n));
  EXPECT_LE(ks_statistic(xs, Cdf::standard_normal()).statistic, 0.5 / n + 1e-9);
}

TEST(Ks, DetectsShiftedMean) {
  Rng rng(3);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = 1.0 + rng.normal();
  std::sort(xs.begin(), xs.end());
  EXPECT_LT(ks_statistic(xs, Cdf::standard_normal()).p_value, 1e-6);
  EXPECT_GT(ks_statistic(xs, Cdf::normal(1.0, 1.0)).p_value, 1e-3);
}

TEST(Ks, SurvivalFunctionValues) {
  // Reference values of the Kolmogorov distribution tail.
  EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-10);
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-10);
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.049485876755377876, 1e-10);
  EXPECT_NEAR(kolmogorov_survival(2.0), 0.0006709252557796953, 1e-12);
  // Both branches agree where they meet.
  EXPECT_NEAR(kolmogorov_survival(1.18 - 1e-12), kolmogorov_survival(1.18), 1e-10);
}

TEST(Ks, PValuesAreRoughlyUniformUnderTheNull) {
  int below = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::child(77, t);
    std::vector<double> xs(500);
    for (auto& x : xs) x = rng.uniform();
    std::sort(xs.begin(), xs.end());
    below += ks_statistic(xs, Cdf::uniform(0.0, 1.0)).p_value < 0.1;
  }
  EXPECT_NEAR(below / double(trials), 0.1, 4.0 * std::sqrt(0.09 / trials));
}

TEST(Reports, JsonAndTextCarryEveryCheck) {
  VerificationReport r;
  r.suite = "demo";
  r.estimates.push_back({"m", 0.5, 0.1});
  r.targets.push_back({"t", 0.0, std::nullopt});
  r.checks.push_back(Check::at_most("small", 1.0, 2.0));
  r.checks.push_back(Check::at_least("large", 1.0, 2.0));
  r.finalize();
  EXPECT_FALSE(r.passed);
  const auto j = to_json(r);
  EXPECT_EQ(j["suite"], "demo");
  EXPECT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["checks"][0]["passed"], true);
  EXPECT_EQ(j["checks"][1]["passed"], false);
  EXPECT_EQ(j["estimates"][0]["std_error"], 0.1);
  EXPECT_FALSE(j["targets"][0].contains("std_error"));
  const auto text = to_text(r);
  EXPECT_NE(text.find("FAIL"), std::string::npos);
  EXPECT_NE(text.find("small"), std::string::npos);

  VerificationReport empty;
  empty.finalize();
  EXPECT_FALSE(empty.passed);
}

TEST(Suites, CltPassesOnAsymmetricTelegraph) {
  const auto k = fixtures::asymmetric_telegraph();
  CltOptions options;
  options.n_reps = 4000;
  options.seed = 5;
  const auto r = clt_suite(k, limit_parameters(k), options);
  EXPECT_TRUE(r.passed) << to_text(r);
}

TEST(Suites, CltWithoutScalingFailsKs) {
  const auto k = fixtures::symmetric_telegraph();
  CltOptions options;
  options.lambda = 1.0;
  options.n_reps = 4000;
  const auto r = clt_suite(k, limit_parameters(k), options);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(check_passed(r, "ks_p_value@1"));
}

TEST(Suites, CltRequiresEnoughReplications) {
  const auto k = fixtures::symmetric_telegraph();
  CltOptions options;
  options.n_reps = 999;
  EXPECT_THROW(clt_suite(k, limit_parameters(k), options), Error);
}

TEST(Suites, CltWithZeroDiffusionSkipsDistributionChecks) {
  const auto k = fixtures::deterministic_cycle();
  CltOptions options;
  options.n_reps = 1000;
  const auto r = clt_suite(k, limit_parameters(k), options);
  EXPECT_TRUE(r.passed) << to_text(r);
  for (const auto& c : r.checks) EXPECT_EQ(c.name.find("ks"), std::string::npos);
}

TEST(Suites, CltDetectsWrongVarianceTarget) {
  const auto k = fixtures::symmetric_telegraph();
  auto params = limit_parameters(k);
  params.diffusion = 1.5;
  CltOptions options;
  options.n_reps = 4000;
  EXPECT_FALSE(clt_suite(k, params, options).passed);
}

TEST(Suites, RenewalResidualErgodicOccupancyOnThreeState) {
  const auto k = fixtures::three_state();
  RenewalOptions renewal;
  renewal.seed = 1;
  EXPECT_TRUE(renewal_suite(k, renewal).passed);
  ResidualOptions residual;
  residual.seed = 2;
  EXPECT_TRUE(residual_suite(k, residual).passed);
  for (const auto f : {StepFunction::X, StepFunction::VX})
    EXPECT_TRUE(ergodic_suite(k, ErgodicOptions{f, 1000000, 0.01, 3}).passed);
  EXPECT_TRUE(occupancy_suite(k, OccupancyOptions{1e5, 0.01, 0.01, 4}).passed);
}

TEST(Suites, ErgodicZeroTargetUsesAbsoluteScale) {
  const auto r = ergodic_suite(fixtures::symmetric_telegraph(), ErgodicOptions{StepFunction::VX, 1000000, 0.01, 9});
  EXPECT_TRUE(r.passed) << to_text(r);
  ASSERT_EQ(r.targets.size(), 1u);
  EXPECT_NEAR(r.targets[0].value, 0.0, 1e-15);
}

TEST(Suites, ResidualOnDeterministicSojourns) {
  // Sojourn 1 everywhere: sup R(nt) over [0,1] is exactly 1, so sup / sqrt(n) = n^{-1/2}.
  const auto r = residual_suite(fixtures::deterministic_cycle(), ResidualOptions{});
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.estimates.back().value, 0.01, 1e-12);
}

TEST(Suites, WaldGamma2MixingOnThreeState) {
  const auto k = fixtures::three_state();
  EXPECT_TRUE(wald_suite(k, WaldOptions{1, 100000, 7}).passed);
  EXPECT_TRUE(gamma2_suite(k, Gamma2Options{100000, 1e-10, 8}).passed);
  const auto mixing = mixing_suite(k);
  EXPECT_TRUE(mixing.passed) << to_text(mixing);
}

TEST(Suites, MixingOnPeriodicKernelIsRejected) {
  EXPECT_THROW(mixing_suite(fixtures::symmetric_telegraph()), Error);
}

TEST(Suites, TvLogSlope) {
  const auto P = fixtures::matrix({{0.5, 0.5}, {0.25, 0.75}});
  const auto pi = stationary_distribution(P);
  const auto slope = tv_log_slope(P, pi, 10);
  ASSERT_TRUE(slope.has_value());
  EXPECT_NEAR(*slope, std::log(0.25), 1e-8);
  const auto equal = fixtures::matrix({{0.3, 0.7}, {0.3, 0.7}});
  EXPECT_FALSE(tv_log_slope(equal, stationary_distribution(equal), 20).has_value());
}

TEST(Suites, ReportsDoNotDependOnWorkers) {
  const auto k = fixtures::three_state();
  CltOptions clt;
  clt.n_reps = 2000;
  clt.workers = 1;
  const auto a = to_json(clt_suite(k, limit_parameters(k), clt)).dump();
  clt.workers = 3;
  const auto b = to_json(clt_suite(k, limit_parameters(k), clt)).dump();
  EXPECT_EQ(a, b);
  RenewalOptions renewal;
  renewal.n_values = {100, 1000};
  renewal.workers = 1;
  const auto c = to_json(renewal_suite(k, renewal)).dump();
  renewal.workers = 4;
  EXPECT_EQ(c, to_json(renewal_suite(k, renewal)).dump());
}
