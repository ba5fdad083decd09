#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "smlab/kernel.hpp"
#include "smlab/limits.hpp"
#include "smlab/parallel.hpp"
#include "smlab/regen.hpp"

namespace smlab {

// ---------------------------------------------------------------------------
// Test primitives

/// Continuous reference distributions for the KS test.
struct Cdf {
  enum class Kind { Normal, Uniform };
  Kind kind = Kind::Normal;
  double first = 0.0;   // mean, or lower bound
  double second = 1.0;  // standard deviation, or upper bound

  static Cdf standard_normal() { return {Kind::Normal, 0.0, 1.0}; }
  static Cdf normal(double mean, double sd) { return {Kind::Normal, mean, sd}; }
  static Cdf uniform(double a, double b) { return {Kind::Uniform, a, b}; }

  double operator()(double x) const;
};

/// Q_KS(x) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2), the asymptotic
/// Kolmogorov tail probability.
double kolmogorov_survival(double x);

struct KsResult {
  double statistic;
  double p_value;
};

inline constexpr std::size_t kMinKsSamples = 8;

/// One-sample KS test of sorted samples against `cdf`. The p-value is the
/// asymptotic one at sqrt(n) D. Throws TooFewSamples below kMinKsSamples
/// unless `enforce_min_samples` is false.
KsResult ks_statistic(std::span<const double> sorted, const Cdf& cdf, bool enforce_min_samples = true);

// ---------------------------------------------------------------------------
// Reports

struct NamedValue {
  std::string name;
  double value;
  std::optional<double> std_error;
};

/// A single pass/fail comparison. AtMost: passed iff statistic <= threshold;
/// AtLeast: passed iff statistic >= threshold.
struct Check {
  enum class Direction { AtMost, AtLeast };
  std::string name;
  double statistic;
  double threshold;
  Direction direction;
  bool passed;

  static Check at_most(std::string name, double statistic, double threshold);
  static Check at_least(std::string name, double statistic, double threshold);
};

struct VerificationReport {
  std::string suite;
  std::vector<NamedValue> estimates;
  std::vector<NamedValue> targets;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool passed = false;
  std::uint64_t seed = 0;
  std::size_t replications = 0;

  /// passed = every check passed (and at least one check ran).
  void finalize();
};

nlohmann::ordered_json to_json(const VerificationReport& report);
std::string to_text(const VerificationReport& report);

// ---------------------------------------------------------------------------
// Suites

struct CltOptions {
  double lambda = 400.0;
  std::vector<double> t_points = {0.5, 1.0};
  std::size_t n_reps = 20000;
  std::uint64_t seed = 42;
  unsigned workers = kAutoWorkers;
};

/// Replicates X_lambda and checks mean, variance against diffusion * t, KS
/// normality at t = 1 and the increment-correlation proxy. The variance
/// target comes from `params` (the same record `analyze` reports).
VerificationReport clt_suite(const SemiMarkovKernel& kernel, const LimitParameters& params, const CltOptions& options);

struct RenewalOptions {
  std::vector<std::size_t> n_values = {100, 1000, 10000};
  std::vector<double> grid;  // empty: 0, 0.05, ..., 1
  std::size_t n_reps = 100;
  double epsilon = 0.05;
  double max_frequency = 0.05;
  std::uint64_t seed = 42;
  unsigned workers = kAutoWorkers;
};

VerificationReport renewal_suite(const SemiMarkovKernel& kernel, const RenewalOptions& options);

struct ErgodicOptions {
  StepFunction f = StepFunction::X;
  std::size_t n_steps = 1000000;
  double relative_tolerance = 0.01;
  std::uint64_t seed = 42;
};

VerificationReport ergodic_suite(const SemiMarkovKernel& kernel, const ErgodicOptions& options);

struct ResidualOptions {
  std::vector<std::size_t> n_values = {100, 1000, 10000};
  std::size_t n_reps = 100;
  double horizon = 1.0;
  double threshold = 0.1;
  std::uint64_t seed = 42;
  unsigned workers = kAutoWorkers;
};

/// Median over replications of sup_{t <= T} R(n t) / sqrt(n). The supremum
/// is exact: the largest completed sojourn or the current age at n T.
VerificationReport residual_suite(const SemiMarkovKernel& kernel, const ResidualOptions& options);

struct OccupancyOptions {
  double horizon = 1e5;
  double tv_tolerance = 0.01;
  double relative_tolerance = 0.01;
  std::uint64_t seed = 42;
};

VerificationReport occupancy_suite(const SemiMarkovKernel& kernel, const OccupancyOptions& options);

struct WaldOptions {
  std::size_t v0 = 0;
  std::size_t n_cycles = 100000;
  std::uint64_t seed = 42;
  unsigned workers = kAutoWorkers;
};

VerificationReport wald_suite(const SemiMarkovKernel& kernel, const WaldOptions& options);

struct Gamma2Options {
  std::size_t n_cycles = 100000;
  double tol = 1e-10;
  std::uint64_t seed = 42;
  unsigned workers = kAutoWorkers;
};

/// Series form of gamma^2 against the cycle form at every reference state,
/// plus pairwise invariance of the cycle form across reference states.
VerificationReport gamma2_suite(const SemiMarkovKernel& kernel, const Gamma2Options& options);

struct MixingOptions {
  int max_lag = 30;
  double slope_slack = 0.05;
};

/// Covariance decay |cov(k)| <= |cov(1)| slem^{k-1} and the log-linear TV
/// decay rate against log(slem). Stands in for the phi-mixing coefficients.
VerificationReport mixing_suite(const SemiMarkovKernel& kernel, const MixingOptions& options = {});

/// Least-squares slope of log d(n) over n = 1..max_n, skipping d(n) <= 1e-13.
/// Returns nullopt when fewer than two points remain.
std::optional<double> tv_log_slope(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi, int max_n);

}  // namespace smlab
