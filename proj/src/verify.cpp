#include "smlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "smlab/errors.hpp"
#include "smlab/simulate.hpp"

namespace smlab {

namespace {

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (const double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs, double mean) {
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Largest step up in a sequence that should be non-increasing; <= 0 when it is.
double largest_increase(const std::vector<double>& xs) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < xs.size(); ++i) worst = std::max(worst, xs[i] - xs[i - 1]);
  return xs.size() < 2 ? 0.0 : worst;
}

ChainStructure irreducible_structure(const SemiMarkovKernel& kernel) {
  auto structure = validate_kernel(kernel);
  if (!structure.irreducible) fail(ErrorKind::NotIrreducible, "verification suites need an irreducible kernel");
  return structure;
}

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
  return grid;
}

std::string compact(double x) { return fmt::format("{:g}", x); }

// |diff| / se, with a zero standard error meaning "exact": 0 if equal, else inf.
double z_score(double diff, double se) {
  if (se > 0.0) return std::abs(diff) / se;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

// ---------------------------------------------------------------------------
// KS

double Cdf::operator()(double x) const {
  switch (kind) {
    case Kind::Normal: return 0.5 * std::erfc(-(x - first) / (second * std::numbers::sqrt2));
    case Kind::Uniform:
      if (x <= first) return 0.0;
      if (x >= second) return 1.0;
      return (x - first) / (second - first);
  }
  return 0.0;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // Jacobi dual form; the alternating series converges slowly here.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int j = 1; j <= 100; ++j) {
      const double odd = 2.0 * j - 1.0;
      s += std::exp(-odd * odd * pi2 / (8.0 * x * x));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) s += (j % 2 == 1 ? 2.0 : -2.0) * std::exp(-2.0 * j * j * x * x);
  return std::clamp(s, 0.0, 1.0);
}

KsResult ks_statistic(std::span<const double> sorted, const Cdf& cdf, bool enforce_min_samples) {
  const auto n = sorted.size();
  if (n == 0 || (enforce_min_samples && n < kMinKsSamples))
    fail(ErrorKind::TooFewSamples, fmt::format("KS needs at least {} samples, got {}", kMinKsSamples, n));
  if (!std::is_sorted(sorted.begin(), sorted.end())) fail(ErrorKind::InvalidArgument, "KS samples must be sorted");
  const double dn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (i + 1.0) / dn - f, f - i / dn});
  }
  return {d, kolmogorov_survival(std::sqrt(dn) * d)};
}

// ---------------------------------------------------------------------------
// Reports

Check Check::at_most(std::string name, double statistic, double threshold) {
  return {std::move(name), statistic, threshold, Direction::AtMost, statistic <= threshold};
}

Check Check::at_least(std::string name, double statistic, double threshold) {
  return {std::move(name), statistic, threshold, Direction::AtLeast, statistic >= threshold};
}

void VerificationReport::finalize() {
  passed = !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

nlohmann::ordered_json to_json(const VerificationReport& report) {
  nlohmann::ordered_json out;
  out["suite"] = report.suite;
  out["passed"] = report.passed;
  out["seed"] = report.seed;
  out["replications"] = report.replications;
  auto values = [](const std::vector<NamedValue>& xs) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& x : xs) {
      nlohmann::ordered_json item;
      item["name"] = x.name;
      item["value"] = x.value;
      if (x.std_error) item["std_error"] = *x.std_error;
      arr.push_back(std::move(item));
    }
    return arr;
  };
  out["estimates"] = values(report.estimates);
  out["targets"] = values(report.targets);
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json item;
    item["name"] = c.name;
    item["statistic"] = c.statistic;
    item["threshold"] = c.threshold;
    item["direction"] = c.direction == Check::Direction::AtMost ? "at_most" : "at_least";
    item["passed"] = c.passed;
    checks.push_back(std::move(item));
  }
  out["checks"] = std::move(checks);
  out["notes"] = report.notes;
  return out;
}

std::string to_text(const VerificationReport& report) {
  std::string out = fmt::format("== {} [{}]  seed={} replications={}\n", report.suite, report.passed ? "PASS" : "FAIL",
                                report.seed, report.replications);
  for (const auto& e : report.estimates) {
    out += fmt::format("  estimate  {:<28} {:>14.8g}", e.name, e.value);
    if (e.std_error) out += fmt::format("  (se {:.3g})", *e.std_error);
    out += "\n";
  }
  for (const auto& t : report.targets) out += fmt::format("  target    {:<28} {:>14.8g}\n", t.name, t.value);
  for (const auto& c : report.checks)
    out += fmt::format("  check     {:<28} {:>14.8g} {} {:<12.6g} {}\n", c.name, c.statistic,
                       c.direction == Check::Direction::AtMost ? "<=" : ">=", c.threshold, c.passed ? "pass" : "FAIL");
  for (const auto& n : report.notes) out += "  note      " + n + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// CLT

VerificationReport clt_suite(const SemiMarkovKernel& kernel, const LimitParameters& params, const CltOptions& options) {
  const auto structure = irreducible_structure(kernel);
  if (options.n_reps < 1000) fail(ErrorKind::InvalidArgument, "clt suite needs at least 1000 replications");
  if (!(options.lambda > 0.0)) fail(ErrorKind::InvalidArgument, "lambda must be positive");
  for (const double t : options.t_points)
    if (!(t > 0.0)) fail(ErrorKind::InvalidArgument, "t_points must be positive");

  std::set<double> unique(options.t_points.begin(), options.t_points.end());
  unique.insert(0.5);
  unique.insert(1.0);
  const std::vector<double> grid(unique.begin(), unique.end());
  auto index_of = [&](double t) { return static_cast<std::size_t>(std::find(grid.begin(), grid.end(), t) - grid.begin()); };

  // Starting from the time-stationary state law keeps the finite-lambda
  // bias of the mean out of the checks.
  const InitialLaw initial = occupancy_limit(kernel, structure.pi);
  const TransitionSampler sampler(kernel);
  const auto paths = parallel_map(options.n_reps, options.workers, [&](std::size_t r) {
    Rng rng = Rng::child(options.seed, r);
    return scaled_integral_path(sampler, options.lambda, params.theta, grid, rng, initial);
  });

  VerificationReport report;
  report.suite = "clt";
  report.seed = options.seed;
  report.replications = options.n_reps;
  const double n = static_cast<double>(options.n_reps);
  report.targets.push_back({"diffusion", params.diffusion, std::nullopt});
  report.targets.push_back({"theta", params.theta, std::nullopt});

  // A vanishing gamma^2 (e.g. a deterministic cycle) collapses the limit to
  // zero; relative variance errors and a KS test against N(0, 0) are void.
  const bool degenerate = !(params.diffusion > 1e-12);
  std::vector<double> column(options.n_reps);
  for (const double t : options.t_points) {
    const auto i = index_of(t);
    for (std::size_t r = 0; r < options.n_reps; ++r) column[r] = paths[r][i];
    const double mean = mean_of(column);
    const double var = variance_of(column, mean);
    const double se = std::sqrt(var / n);
    const double target = params.diffusion * t;
    report.estimates.push_back({fmt::format("mean@{}", compact(t)), mean, se});
    report.estimates.push_back({fmt::format("variance@{}", compact(t)), var, var * std::sqrt(2.0 / (n - 1.0))});
    report.targets.push_back({fmt::format("variance@{}", compact(t)), target, std::nullopt});
    report.checks.push_back(Check::at_most(fmt::format("mean_z@{}", compact(t)), z_score(mean, se), 3.0));
    if (degenerate)
      report.checks.push_back(Check::at_most(fmt::format("variance_abs_err@{}", compact(t)), var, 0.05));
    else
      report.checks.push_back(
          Check::at_most(fmt::format("variance_rel_err@{}", compact(t)), std::abs(var / target - 1.0), 0.05));
  }

  if (degenerate) {
    report.notes.push_back("zero diffusion: the limit is the zero process, distributional checks skipped");
    report.notes.push_back(fmt::format("limit method {}; X_lambda centred at theta = {}", to_string(params.method),
                                       compact(params.theta)));
    report.finalize();
    return report;
  }

  const auto at_half = index_of(0.5);
  const auto at_one = index_of(1.0);
  for (std::size_t r = 0; r < options.n_reps; ++r) column[r] = paths[r][at_one] / std::sqrt(params.diffusion);
  std::sort(column.begin(), column.end());
  const auto ks = ks_statistic(column, Cdf::standard_normal());
  report.estimates.push_back({"ks_D@1", ks.statistic, std::nullopt});
  report.checks.push_back(Check::at_least("ks_p_value@1", ks.p_value, 0.001));

  std::vector<double> first(options.n_reps);
  std::vector<double> increment(options.n_reps);
  for (std::size_t r = 0; r < options.n_reps; ++r) {
    first[r] = paths[r][at_half];
    increment[r] = paths[r][at_one] - paths[r][at_half];
  }
  const double m1 = mean_of(first);
  const double m2 = mean_of(increment);
  double sxy = 0.0;
  for (std::size_t r = 0; r < options.n_reps; ++r) sxy += (first[r] - m1) * (increment[r] - m2);
  sxy /= n - 1.0;
  const double corr = sxy / std::sqrt(variance_of(first, m1) * variance_of(increment, m2));
  const double corr_se = 1.0 / std::sqrt(n);
  report.estimates.push_back({"increment_correlation", corr, corr_se});
  report.checks.push_back(Check::at_most("increment_correlation_z", z_score(corr, corr_se), 3.0));

  report.notes.push_back(fmt::format("limit method {}; X_lambda centred at theta = {}", to_string(params.method),
                                     compact(params.theta)));
  if (options.lambda < 100.0) report.notes.push_back("lambda below 100: outside the calibrated regime");
  report.finalize();
  return report;
}

// ---------------------------------------------------------------------------
// Renewal

VerificationReport renewal_suite(const SemiMarkovKernel& kernel, const RenewalOptions& options) {
  const auto structure = irreducible_structure(kernel);
  if (options.n_values.empty() || options.n_reps == 0) fail(ErrorKind::InvalidArgument, "renewal suite needs n values and replications");
  const double mu = mean_sojourn(kernel, structure.pi);
  const auto grid = options.grid.empty() ? default_grid() : options.grid;
  const double t_max = *std::max_element(grid.begin(), grid.end());
  if (!(t_max > 0.0)) fail(ErrorKind::InvalidArgument, "renewal grid must reach a positive time");
  const TransitionSampler sampler(kernel);
  const InitialLaw initial = structure.pi;

  VerificationReport report;
  report.suite = "renewal";
  report.seed = options.seed;
  report.replications = options.n_reps;
  report.targets.push_back({"1/mu", 1.0 / mu, std::nullopt});

  std::vector<double> frequencies;
  for (std::size_t j = 0; j < options.n_values.size(); ++j) {
    const double n = static_cast<double>(options.n_values[j]);
    const auto sups = parallel_map(options.n_reps, options.workers, [&](std::size_t r) {
      Rng rng = Rng::child(options.seed, j * options.n_reps + r);
      const auto traj = sample_markov_renewal(sampler, initial, UntilTime{n * t_max}, rng);
      double sup = 0.0;
      for (const double t : grid) sup = std::max(sup, std::abs(counting(traj, n * t) / n - t / mu));
      return sup;
    });
    const double exceed =
        static_cast<double>(std::count_if(sups.begin(), sups.end(), [&](double s) { return s >= options.epsilon; })) /
        static_cast<double>(options.n_reps);
    frequencies.push_back(exceed);
    report.estimates.push_back({fmt::format("exceedance@n={}", options.n_values[j]), exceed, std::nullopt});
    report.estimates.push_back({fmt::format("median_sup_dev@n={}", options.n_values[j]), median_of(sups), std::nullopt});
  }
  report.checks.push_back(Check::at_most(fmt::format("exceedance@n={}", options.n_values.back()), frequencies.back(),
                                         options.max_frequency));
  report.checks.push_back(Check::at_most("exceedance_largest_increase", largest_increase(frequencies), 0.0));
  report.notes.push_back(fmt::format("epsilon = {}; sup over {} grid points in [0, {}]", compact(options.epsilon),
                                     grid.size(), compact(t_max)));
  report.finalize();
  return report;
}

// ---------------------------------------------------------------------------
// Ergodic

VerificationReport ergodic_suite(const SemiMarkovKernel& kernel, const ErgodicOptions& options) {
  const auto structure = irreducible_structure(kernel);
  if (options.n_steps == 0) fail(ErrorKind::InvalidArgument, "ergodic suite needs steps");
  const double drift = theta(kernel, structure.pi);
  const double target = stationary_step_mean(kernel, structure.pi, options.f, drift);

  const TransitionSampler sampler(kernel);
  Rng rng = Rng::child(options.seed, 0);
  const auto traj = sample_markov_renewal(sampler, InitialLaw{structure.pi}, NSteps{options.n_steps}, rng);
  double sum = 0.0;
  for (std::size_t k = 0; k < traj.steps(); ++k)
    sum += evaluate(options.f, traj.values[traj.states[k]], traj.sojourns[k], drift);
  const double mean = sum / static_cast<double>(traj.steps());

  // Relative error, except when the target vanishes: then the error is
  // measured against E_pi|f|.
  double scale = std::abs(target);
  std::string basis = "|target|";
  const Eigen::VectorXd mu = kernel.mean_sojourns();
  double abs_mean = 0.0;
  for (std::size_t v = 0; v < kernel.size(); ++v)
    abs_mean += structure.pi(v) * std::abs(evaluate(options.f, kernel.states[v], mu(v), drift));
  if (scale <= 1e-12 * std::max(1.0, abs_mean)) {
    scale = abs_mean;
    basis = "E_pi|f|";
  }

  VerificationReport report;
  report.suite = "ergodic";
  report.seed = options.seed;
  report.replications = 1;
  report.estimates.push_back({"time_average[" + to_string(options.f) + "]", mean, std::nullopt});
  report.targets.push_back({"E_pi[" + to_string(options.f) + "]", target, std::nullopt});
  report.checks.push_back(Check::at_most("relative_error", std::abs(mean - target) / scale, options.relative_tolerance));
  report.notes.push_back(fmt::format("{} steps from the stationary start; error scaled by {}", options.n_steps, basis));
  report.finalize();
  return report;
}

// ---------------------------------------------------------------------------
// Residual life

VerificationReport residual_suite(const SemiMarkovKernel& kernel, const ResidualOptions& options) {
  const auto structure = irreducible_structure(kernel);
  if (options.n_values.empty() || options.n_reps == 0) fail(ErrorKind::InvalidArgument, "residual suite needs n values and replications");
  const TransitionSampler sampler(kernel);
  const InitialLaw initial = structure.pi;

  VerificationReport report;
  report.suite = "residual";
  report.seed = options.seed;
  report.replications = options.n_reps;

  std::vector<double> medians;
  for (std::size_t j = 0; j < options.n_values.size(); ++j) {
    const double n = static_cast<double>(options.n_values[j]);
    const double end = n * options.horizon;
    const auto sups = parallel_map(options.n_reps, options.workers, [&](std::size_t r) {
      Rng rng = Rng::child(options.seed, j * options.n_reps + r);
      const auto traj = sample_markov_renewal(sampler, initial, UntilTime{end}, rng);
      const std::size_t last = counting(traj, end);
      double sup = end - traj.arrivals[last];
      for (std::size_t k = 0; k < last; ++k) sup = std::max(sup, traj.sojourns[k]);
      return sup / std::sqrt(n);
    });
    medians.push_back(median_of(sups));
    report.estimates.push_back({fmt::format("median_sup_R/sqrt(n)@n={}", options.n_values[j]), medians.back(), std::nullopt});
  }
  report.checks.push_back(Check::at_most(fmt::format("median@n={}", options.n_values.back()), medians.back(), options.threshold));
  report.checks.push_back(Check::at_most("median_largest_increase", largest_increase(medians), 0.0));
  report.notes.push_back(fmt::format("exact supremum over t in [0, {}]", compact(options.horizon)));
  report.finalize();
  return report;
}

// ---------------------------------------------------------------------------
// Occupancy

VerificationReport occupancy_suite(const SemiMarkovKernel& kernel, const OccupancyOptions& options) {
  const auto structure = irreducible_structure(kernel);
  if (!(options.horizon > 0.0)) fail(ErrorKind::InvalidArgument, "occupancy horizon must be positive");
  const Eigen::VectorXd limit = occupancy_limit(kernel, structure.pi);
  const double drift = theta(kernel, structure.pi);

  const TransitionSampler sampler(kernel);
  Rng rng = Rng::child(options.seed, 0);
  const auto traj = sample_markov_renewal(sampler, InitialLaw{structure.pi}, UntilTime{options.horizon}, rng);
  const double T = options.horizon;
  Eigen::VectorXd time_in = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kernel.size()));
  for (std::size_t k = 0; k < traj.steps(); ++k) {
    const double start = traj.arrivals[k];
    if (start >= T) break;
    time_in(traj.states[k]) += std::min(traj.arrivals[k + 1], T) - start;
  }
  const Eigen::VectorXd fraction = time_in / T;
  const double tv = 0.5 * (fraction - limit).cwiseAbs().sum();
  const double time_average = integral_path(traj, std::vector<double>{T}).front() / T;

  double scale = std::abs(drift);
  std::string basis = "|theta|";
  double abs_velocity = 0.0;
  for (std::size_t v = 0; v < kernel.size(); ++v) abs_velocity += limit(v) * std::abs(kernel.states[v]);
  if (scale <= 1e-12 * std::max(1.0, abs_velocity)) {
    scale = abs_velocity;
    basis = "E|V|";
  }

  VerificationReport report;
  report.suite = "occupancy";
  report.seed = options.seed;
  report.replications = 1;
  for (std::size_t v = 0; v < kernel.size(); ++v) {
    report.estimates.push_back({fmt::format("fraction[{}]", v), fraction(v), std::nullopt});
    report.targets.push_back({fmt::format("occupancy[{}]", v), limit(v), std::nullopt});
  }
  report.estimates.push_back({"time_average_V", time_average, std::nullopt});
  report.targets.push_back({"theta", drift, std::nullopt});
  report.checks.push_back(Check::at_most("occupancy_tv", tv, options.tv_tolerance));
  report.checks.push_back(Check::at_most("time_average_rel_err", std::abs(time_average - drift) / scale,
                                         options.relative_tolerance));
  report.notes.push_back(fmt::format("horizon {}; drift error scaled by {}", compact(T), basis));
  report.finalize();
  return report;
}

// ---------------------------------------------------------------------------
// Wald

VerificationReport wald_suite(const SemiMarkovKernel& kernel, const WaldOptions& options) {
  irreducible_structure(kernel);
  VerificationReport report;
  report.suite = "wald";
  report.seed = options.seed;
  report.replications = options.n_cycles;
  const StepFunction catalog[] = {StepFunction::One, StepFunction::X, StepFunction::VX, StepFunction::CenteredVX};
  for (std::size_t i = 0; i < std::size(catalog); ++i) {
    const auto f = catalog[i];
    const auto result = wald_check(kernel, f, options.v0, options.n_cycles, child_key(options.seed, i), options.workers);
    const std::string tag = to_string(f);
    report.estimates.push_back({"cycle_sum[" + tag + "]", result.lhs, result.std_error});
    report.targets.push_back({"E[tau]E_pi[" + tag + "]", result.rhs, std::nullopt});
    // Cycle sums of f = 1 can be constant (SE 0); allow rounding slack only.
    report.checks.push_back(Check::at_most("abs_diff[" + tag + "]", std::abs(result.lhs - result.rhs),
                                           3.0 * result.std_error + 1e-12 * std::max(1.0, std::abs(result.rhs))));
  }
  report.notes.push_back(fmt::format("reference state {}; E[tau_1] = 1/pi_v0", options.v0));
  report.finalize();
  return report;
}

// ---------------------------------------------------------------------------
// Dual gamma^2

VerificationReport gamma2_suite(const SemiMarkovKernel& kernel, const Gamma2Options& options) {
  const auto structure = irreducible_structure(kernel);
  const double drift = theta(kernel, structure.pi);
  const double series = gamma2_series(kernel, structure.pi, drift, options.tol);

  VerificationReport report;
  report.suite = "gamma2";
  report.seed = options.seed;
  report.replications = options.n_cycles;
  report.targets.push_back({"gamma2_series", series, std::nullopt});

  std::vector<Gamma2Estimate> estimates;
  for (std::size_t v0 = 0; v0 < kernel.size(); ++v0) {
    estimates.push_back(
        estimate_gamma2_cycles(kernel, v0, options.n_cycles, drift, child_key(options.seed, v0), options.workers));
    const auto& e = estimates.back();
    report.estimates.push_back({fmt::format("gamma2_cycle[v0={}]", v0), e.estimate, e.std_error});
    report.checks.push_back(
        Check::at_most(fmt::format("series_vs_cycle_z[v0={}]", v0), z_score(e.estimate - series, e.std_error), 3.0));
  }
  for (std::size_t i = 0; i < estimates.size(); ++i)
    for (std::size_t j = i + 1; j < estimates.size(); ++j) {
      const double se = std::hypot(estimates[i].std_error, estimates[j].std_error);
      report.checks.push_back(Check::at_most(fmt::format("invariance_z[{},{}]", i, j),
                                             z_score(estimates[i].estimate - estimates[j].estimate, se), 3.0));
    }
  report.finalize();
  return report;
}

// ---------------------------------------------------------------------------
// Mixing proxy

std::optional<double> tv_log_slope(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi, int max_n) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int n = 1; n <= max_n; ++n) {
    const double d = tv_to_stationary(P, pi, n);
    if (d <= 1e-13) continue;
    xs.push_back(n);
    ys.push_back(std::log(d));
  }
  if (xs.size() < 2) return std::nullopt;
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

VerificationReport mixing_suite(const SemiMarkovKernel& kernel, const MixingOptions& options) {
  const auto structure = irreducible_structure(kernel);
  if (structure.period != 1) fail(ErrorKind::PeriodicChain, "mixing proxy needs an aperiodic chain");
  const double drift = theta(kernel, structure.pi);
  const double rho = structure.slem;
  const double c = std::abs(autocovariance(kernel, structure.pi, drift, 1));

  VerificationReport report;
  report.suite = "mixing";
  report.replications = 0;
  report.estimates.push_back({"slem", rho, std::nullopt});
  report.estimates.push_back({"C=|cov(1)|", c, std::nullopt});

  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= options.max_lag; ++k) {
    const double cov = std::abs(autocovariance(kernel, structure.pi, drift, k));
    const double bound = c * std::pow(rho, k - 1);
    // Relative rounding slack on the bound, absolute slack near zero.
    worst = std::max(worst, cov - bound - 1e-12 * bound - 1e-15);
  }
  report.checks.push_back(Check::at_most(fmt::format("cov_excess_over_bound[k=1..{}]", options.max_lag), worst, 0.0));

  if (const auto slope = tv_log_slope(kernel.P, structure.pi, options.max_lag); slope && rho > 0.0) {
    report.estimates.push_back({"tv_log_slope", *slope, std::nullopt});
    report.checks.push_back(Check::at_most("tv_log_slope", *slope, std::log(rho) + options.slope_slack));
  } else {
    report.notes.push_back("TV distance vanishes after one step; slope check not applicable");
  }
  report.notes.push_back("phi-mixing is checked only through covariance decay and TV decay");
  report.finalize();
  return report;
}

}  // namespace smlab
