// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes. Seeds are fixed so the run is reproducible.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "json.hpp"
#include "smlab/cli.hpp"
#include "smlab/config.hpp"
#include "smlab/limits.hpp"
#include "smlab/regen.hpp"
#include "smlab/simulate.hpp"
#include "smlab/telegraph.hpp"
#include "smlab/verify.hpp"

using namespace smlab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool passed;
  std::string detail;
};

const Check* check_named(const VerificationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

double estimate_named(const VerificationReport& r, const std::string& name) {
  for (const auto& e : r.estimates)
    if (e.name == name) return e.value;
  throw std::runtime_error("no estimate " + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("smlab_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct NamedKernel {
  std::string name;
  SemiMarkovKernel kernel;
};

std::vector<NamedKernel> all_kernels() {
  return {{"symmetric telegraph", fixtures::symmetric_telegraph()},
          {"asymmetric telegraph", fixtures::asymmetric_telegraph()},
          {"three-state", fixtures::three_state()},
          {"two-state", fixtures::two_state()}};
}

// 1 ------------------------------------------------------------------------
Outcome symmetric_clt() {
  const auto k = fixtures::symmetric_telegraph();
  CltOptions options;
  options.lambda = 400.0;
  options.n_reps = 20000;
  options.seed = child_key(kSeed, 1);
  const auto start = std::chrono::steady_clock::now();
  const auto r = clt_suite(k, limit_parameters(k), options);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double mean = estimate_named(r, "mean@1");
  const double var = estimate_named(r, "variance@1");
  const double p = check_named(r, "ks_p_value@1")->statistic;
  const bool ok = std::abs(mean) <= 0.022 && var >= 0.95 && var <= 1.05 && p >= 0.001;
  return {ok, fmt::format("mean={:.5f} (|.|<=0.022) var={:.5f} (in [0.95,1.05]) ks_p={:.4f} (>=0.001) time={:.1f}s",
                          mean, var, p, seconds)};
}

// 2 ------------------------------------------------------------------------
Outcome asymmetric_limit() {
  auto config = load_config(std::string(SMLAB_CONFIG_DIR) + "/telegraph_asymmetric.yaml");
  config.out_dir = scratch("asym").string();
  std::ostringstream out, err;
  if (dispatch(config, "analyze", out, err) != kExitPass) return {false, "analyze failed: " + err.str()};
  const auto j = nlohmann::json::parse(slurp(fs::path(config.out_dir) / "analyze.json"));
  const double drift = j["theta"].get<double>();
  const double diffusion = j["diffusion"].get<double>();
  const auto closed = telegraph_limit(*config.telegraph);

  const auto k = fixtures::asymmetric_telegraph();
  CltOptions options;
  options.seed = child_key(kSeed, 2);
  const auto r = clt_suite(k, limit_parameters(k), options);
  const double var = estimate_named(r, "variance@1");
  const bool ok = std::abs(drift - 1.0) <= 1e-12 && std::abs(diffusion - 4.0 / 3.0) <= 1e-12 &&
                  std::abs(closed.diffusion - 4.0 / 3.0) <= 1e-12 && std::abs(var / (4.0 / 3.0) - 1.0) <= 0.05;
  return {ok, fmt::format("drift={:.17g} diffusion={:.17g} clt_var@1={:.5f} (within 5% of 4/3)", drift, diffusion, var)};
}

// 3 ------------------------------------------------------------------------
Outcome dual_gamma2() {
  const auto k = fixtures::three_state();
  const auto exact = fixtures::exact_limits(k);
  const double series = gamma2_series(k, exact.pi, exact.theta);
  bool ok = std::abs(series - exact.gamma2) <= 1e-9;
  std::vector<Gamma2Estimate> est;
  std::string detail = fmt::format("series={:.10f} exact={:.10f}", series, exact.gamma2);
  double worst_z = 0.0;
  for (std::size_t v0 = 0; v0 < 3; ++v0) {
    est.push_back(estimate_gamma2_cycles(k, v0, 100000, exact.theta, child_key(kSeed, 30 + v0)));
    const double z = std::abs(est.back().estimate - series) / est.back().std_error;
    worst_z = std::max(worst_z, z);
    detail += fmt::format(" cycle[v0={}]={:.4f}+-{:.4f}", v0, est.back().estimate, est.back().std_error);
  }
  double worst_pair = 0.0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b)
      worst_pair = std::max(worst_pair, std::abs(est[a].estimate - est[b].estimate) /
                                            std::hypot(est[a].std_error, est[b].std_error));
  ok = ok && worst_z <= 3.0 && worst_pair <= 3.0;
  return {ok, detail + fmt::format(" max_z={:.2f} max_pair_z={:.2f} (<=3)", worst_z, worst_pair)};
}

// 4 ------------------------------------------------------------------------
Outcome uniform_renewal() {
  bool ok = true;
  std::string detail;
  std::size_t i = 0;
  for (const auto& [name, k] : all_kernels()) {
    RenewalOptions options;
    options.seed = child_key(kSeed, 40 + i++);
    const auto r = renewal_suite(k, options);
    const double freq = estimate_named(r, "exceedance@n=10000");
    const double rise = check_named(r, "exceedance_largest_increase")->statistic;
    ok = ok && r.passed && freq <= 0.05 && rise <= 0.0;
    detail += fmt::format("{}: freq@1e4={:.2f} rise={:.2f}; ", name, freq, rise);
  }
  return {ok, detail + "(freq<=0.05, non-increasing)"};
}

// 5 ------------------------------------------------------------------------
Outcome ergodic() {
  bool ok = true;
  std::string detail;
  std::size_t i = 0;
  for (const auto& [name, k] : {NamedKernel{"three-state", fixtures::three_state()},
                                NamedKernel{"two-state", fixtures::two_state()}}) {
    const auto pi = fixtures::power_pi(k.P);
    const Eigen::MatrixXd m1 = fixtures::moments(k, false);
    for (const auto f : {StepFunction::X, StepFunction::VX}) {
      const auto r = ergodic_suite(k, ErgodicOptions{f, 1000000, 0.01, child_key(kSeed, 50 + i++)});
      // Target recomputed independently from the kernel tables.
      double target = 0.0;
      for (Eigen::Index v = 0; v < k.P.rows(); ++v)
        for (Eigen::Index w = 0; w < k.P.cols(); ++w)
          target += pi(v) * k.P(v, w) * m1(v, w) * (f == StepFunction::VX ? k.states[v] : 1.0);
      const double average = r.estimates.front().value;
      const double err = std::abs(target) > 1e-12 ? std::abs(average / target - 1.0) : std::abs(average);
      ok = ok && err <= 0.01 && std::abs(r.targets.front().value - target) <= 1e-12;
      detail += fmt::format("{} f={}: rel_err={:.5f}; ", name, to_string(f), err);
    }
  }
  return {ok, detail + "(<=0.01)"};
}

// 6 ------------------------------------------------------------------------
Outcome wald() {
  const auto k = fixtures::asymmetric_telegraph();
  bool ok = true;
  std::string detail;
  std::size_t i = 0;
  for (const auto f : {StepFunction::One, StepFunction::X, StepFunction::VX, StepFunction::CenteredVX}) {
    const auto r = wald_check(k, f, 0, 100000, child_key(kSeed, 60 + i++));
    const double z = r.std_error > 0.0 ? std::abs(r.lhs - r.rhs) / r.std_error : std::abs(r.lhs - r.rhs) * 1e12;
    ok = ok && z <= 3.0;
    if (f == StepFunction::X) ok = ok && std::abs(r.rhs - 1.5) <= 1e-12;
    detail += fmt::format("f={}: lhs={:.4f} rhs={:.4f} z={:.2f}; ", to_string(f), r.lhs, r.rhs, z);
  }
  return {ok, detail + "(z<=3, rhs[x]=1.5)"};
}

// 7 ------------------------------------------------------------------------
Outcome residual() {
  bool ok = true;
  std::string detail;
  std::size_t i = 0;
  for (const auto& [name, k] : all_kernels()) {
    ResidualOptions options;
    options.seed = child_key(kSeed, 70 + i++);
    const auto r = residual_suite(k, options);
    const double median = estimate_named(r, "median_sup_R/sqrt(n)@n=10000");
    const double rise = check_named(r, "median_largest_increase")->statistic;
    ok = ok && median < 0.1 && rise <= 0.0;
    detail += fmt::format("{}: median@1e4={:.4f} rise={:.4f}; ", name, median, rise);
  }
  return {ok, detail + "(<0.1, non-increasing)"};
}

// 8 ------------------------------------------------------------------------
Outcome occupancy() {
  bool ok = true;
  std::string detail;
  std::size_t i = 0;
  for (const auto& [name, k] : {NamedKernel{"symmetric telegraph", fixtures::symmetric_telegraph()},
                                NamedKernel{"asymmetric telegraph", fixtures::asymmetric_telegraph()},
                                NamedKernel{"three-state", fixtures::three_state()}}) {
    const auto r = occupancy_suite(k, OccupancyOptions{1e5, 0.01, 0.01, child_key(kSeed, 80 + i++)});
    const double tv = check_named(r, "occupancy_tv")->statistic;
    const double err = check_named(r, "time_average_rel_err")->statistic;
    // Target occupancy recomputed from the oracle pi and hand moments.
    const auto exact = fixtures::exact_limits(k);
    const Eigen::VectorXd mu_v = (k.P.array() * fixtures::moments(k, false).array()).rowwise().sum();
    const Eigen::VectorXd target = (exact.pi.array() * mu_v.array()).matrix() / exact.mu;
    double target_gap = 0.0;
    for (Eigen::Index v = 0; v < target.size(); ++v)
      target_gap = std::max(target_gap, std::abs(r.targets[v].value - target(v)));
    ok = ok && tv <= 0.01 && err <= 0.01 && target_gap <= 1e-12;
    detail += fmt::format("{}: tv={:.5f} theta_rel_err={:.5f}; ", name, tv, err);
  }
  return {ok, detail + "(tv<=0.01, err<=0.01)"};
}

// 9 ------------------------------------------------------------------------
Outcome mixing() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, k] : {NamedKernel{"three-state", fixtures::three_state()},
                                NamedKernel{"two-state", fixtures::two_state()}}) {
    const auto r = mixing_suite(k, MixingOptions{30, 0.05});
    const auto* cov = check_named(r, "cov_excess_over_bound[k=1..30]");
    const auto* slope = check_named(r, "tv_log_slope");
    ok = ok && r.passed && cov && slope;
    detail += fmt::format("{}: cov_excess={:.2e} slope={:.4f} (<= {:.4f}); ", name, cov ? cov->statistic : NAN,
                          slope ? slope->statistic : NAN, slope ? slope->threshold : NAN);
  }
  return {ok, detail};
}

// 10 -----------------------------------------------------------------------
Outcome poisson_pmf() {
  const double formula = alternating_poisson_pmf(1.0, 2.0, 1.0, 1);
  const double convolution = fixtures::pmf_one_convolution(1.0, 2.0, 1.0);
  bool ok = std::abs(formula - convolution) <= 1e-10;

  const auto k = telegraph_kernel({1.0, -1.0, 1.0, 2.0, 1.0});
  const TransitionSampler sampler(k);
  constexpr int kTraj = 1000000;
  constexpr int kBins = 40;
  const auto counts = parallel_map(kTraj, kAutoWorkers, [&](std::size_t r) {
    Rng rng = Rng::child(child_key(kSeed, 10), r);
    return std::min<std::size_t>(counting(sample_markov_renewal(sampler, std::size_t{0}, UntilTime{1.0}, rng), 1.0),
                                 kBins - 1);
  });
  std::vector<double> hist(kBins, 0.0);
  for (const auto c : counts) hist[c] += 1.0 / kTraj;
  double tv = 0.0;
  for (int n = 0; n < kBins; ++n) tv += std::abs(hist[n] - alternating_poisson_pmf(1.0, 2.0, 1.0, n));
  tv *= 0.5;
  ok = ok && tv < 0.005;

  double poisson_gap = 0.0;
  for (int n = 0; n <= 30; ++n) {
    const double p = fixtures::poisson_pmf(2.5 * 1.3, n);
    poisson_gap = std::max(poisson_gap, std::abs(alternating_poisson_pmf(2.5, 2.5, 1.3, n) - p) / p);
  }
  ok = ok && poisson_gap <= 1e-13;
  return {ok, fmt::format("n=1 formula-convolution={:.2e} (<=1e-10) empirical_tv={:.5f} (<0.005) "
                          "equal_rate_rel_gap={:.1e}",
                          std::abs(formula - convolution), tv, poisson_gap)};
}

// 11 -----------------------------------------------------------------------
Outcome determinism() {
  bool ok = true;
  std::string detail;
  for (const char* file : {"three_state.yaml", "telegraph_asymmetric.yaml"}) {
    std::vector<std::string> json, text;
    for (const unsigned workers : {1u, 2u, 4u, 1u}) {
      auto config = load_config(std::string(SMLAB_CONFIG_DIR) + "/" + file);
      config.seed = kSeed;
      config.workers = workers;
      config.out_dir = scratch(fmt::format("det_{}", workers)).string();
      std::ostringstream out, err;
      dispatch(config, "verify", out, err);
      json.push_back(slurp(fs::path(config.out_dir) / "reports.json"));
      text.push_back(slurp(fs::path(config.out_dir) / "reports.txt"));
    }
    bool same = !json[0].empty();
    for (std::size_t i = 1; i < json.size(); ++i) same = same && json[i] == json[0] && text[i] == text[0];
    ok = ok && same;
    detail += fmt::format("{}: {} ({} bytes); ", file, same ? "identical" : "DIFFERENT", json[0].size());
  }
  return {ok, detail + "workers 1,2,4 and a repeat"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"symmetric telegraph CLT", symmetric_clt},
      {"asymmetric telegraph limit", asymmetric_limit},
      {"dual gamma^2 equality", dual_gamma2},
      {"uniform renewal theorem", uniform_renewal},
      {"ergodic averages", ergodic},
      {"Wald identity", wald},
      {"residual life", residual},
      {"occupancy limit", occupancy},
      {"mixing proxy", mixing},
      {"alternating Poisson PMF", poisson_pmf},
      {"determinism across workers", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failures += !outcome.passed;
    std::cout << fmt::format("[{}] {:>2}. {}: {}", outcome.passed ? "PASS" : "FAIL", i + 1, criteria[i].first,
                             outcome.detail)
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failures, criteria.size()) << std::endl;
  return failures == 0 ? 0 : 1;
}
