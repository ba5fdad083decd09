#include "smlab/regen.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "smlab/errors.hpp"
#include "smlab/limits.hpp"

namespace smlab {

namespace {

constexpr std::size_t kCyclesPerBlock = 4096;

struct MeanAndError {
  double mean;
  double std_error;
};

MeanAndError mean_and_error(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (const double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd / std::sqrt(n)};
}

// Cycle sums of g(v, x) over n_cycles canonical cycles started at v0.
template <typename StepFn>
std::vector<double> harvest_cycle_sums(const SemiMarkovKernel& kernel, std::size_t v0, std::size_t n_cycles,
                                       std::uint64_t seed, unsigned workers, StepFn g) {
  const TransitionSampler sampler(kernel);
  const std::size_t blocks = (n_cycles + kCyclesPerBlock - 1) / kCyclesPerBlock;
  auto per_block = parallel_map(blocks, workers, [&](std::size_t b) {
    Rng rng = Rng::child(seed, b);
    const std::size_t count = std::min(kCyclesPerBlock, n_cycles - b * kCyclesPerBlock);
    std::vector<double> sums;
    sums.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
      std::size_t state = v0;
      double sum = 0.0;
      do {
        const std::size_t next = sampler.next_state(state, rng);
        const double xi = sampler.sojourn(state, next, rng);
        sum += g(sampler.value(state), xi);
        state = next;
      } while (state != v0);
      sums.push_back(sum);
    }
    return sums;
  });
  std::vector<double> out;
  out.reserve(n_cycles);
  for (const auto& block : per_block) out.insert(out.end(), block.begin(), block.end());
  return out;
}

Eigen::VectorXd irreducible_pi(const SemiMarkovKernel& kernel, std::size_t v0) {
  const auto structure = validate_kernel(kernel);
  if (!structure.irreducible) fail(ErrorKind::NotIrreducible, "cycle estimators need an irreducible kernel");
  if (v0 >= kernel.size()) fail(ErrorKind::InvalidArgument, fmt::format("reference state {} out of range", v0));
  return structure.pi;
}

}  // namespace

CycleSet split_cycles(const Trajectory& traj, std::size_t v0) {
  CycleSet out;
  out.reference_state = v0;
  std::vector<CycleStep> current;
  bool seen_passage = traj.states.front() == v0;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    current.push_back({traj.states[k - 1], traj.sojourns[k - 1]});
    if (traj.states[k] == v0) {
      if (seen_passage) {
        out.cycles.push_back(Cycle{std::move(current)});
      } else {
        out.head = std::move(current);
        seen_passage = true;
      }
      current.clear();
    }
  }
  if (seen_passage) {
    out.tail = std::move(current);
  } else {
    out.head = std::move(current);
  }
  return out;
}

std::vector<CycleStep> concatenate(const CycleSet& set) {
  std::vector<CycleStep> out(set.head);
  for (const auto& cycle : set.cycles) out.insert(out.end(), cycle.steps.begin(), cycle.steps.end());
  out.insert(out.end(), set.tail.begin(), set.tail.end());
  return out;
}

std::vector<CycleSummary> summarize_cycles(const CycleSet& set, const std::vector<double>& values, double theta) {
  std::vector<CycleSummary> out;
  out.reserve(set.cycles.size());
  for (std::size_t i = 0; i < set.cycles.size(); ++i) {
    double sum = 0.0;
    for (const auto& step : set.cycles[i].steps) sum += (values[step.state] - theta) * step.sojourn;
    out.push_back({i, set.cycles[i].length(), sum, sum * sum});
  }
  return out;
}

Gamma2Estimate estimate_gamma2_cycles(const SemiMarkovKernel& kernel, std::size_t v0, std::size_t n_cycles,
                                      double theta, std::uint64_t seed, unsigned workers) {
  const auto pi = irreducible_pi(kernel, v0);
  if (n_cycles < 2) fail(ErrorKind::InvalidArgument, "need at least two cycles");
  auto squares = harvest_cycle_sums(kernel, v0, n_cycles, seed, workers,
                                    [theta](double v, double x) { return (v - theta) * x; });
  for (auto& s : squares) s *= s;
  const auto stats = mean_and_error(squares);
  return {pi(v0) * stats.mean, pi(v0) * stats.std_error, n_cycles};
}

std::string to_string(StepFunction f) {
  switch (f) {
    case StepFunction::One: return "1";
    case StepFunction::X: return "x";
    case StepFunction::VX: return "v*x";
    case StepFunction::CenteredVX: return "(v-theta)*x";
  }
  return "?";
}

StepFunction parse_step_function(const std::string& name) {
  if (name == "1" || name == "one") return StepFunction::One;
  if (name == "x") return StepFunction::X;
  if (name == "v*x" || name == "vx") return StepFunction::VX;
  if (name == "(v-theta)*x" || name == "centered_vx") return StepFunction::CenteredVX;
  fail(ErrorKind::InvalidArgument, "unknown step function '" + name + "' (expected 1, x, vx or centered_vx)");
}

double evaluate(StepFunction f, double v, double x, double theta) {
  switch (f) {
    case StepFunction::One: return 1.0;
    case StepFunction::X: return x;
    case StepFunction::VX: return v * x;
    case StepFunction::CenteredVX: return (v - theta) * x;
  }
  return 0.0;
}

double stationary_step_mean(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi, StepFunction f, double theta) {
  const Eigen::VectorXd mu = kernel.mean_sojourns();
  double out = 0.0;
  for (std::size_t v = 0; v < kernel.size(); ++v) {
    const double value = kernel.states[v];
    double conditional = 0.0;
    switch (f) {
      case StepFunction::One: conditional = 1.0; break;
      case StepFunction::X: conditional = mu(v); break;
      case StepFunction::VX: conditional = value * mu(v); break;
      case StepFunction::CenteredVX: conditional = (value - theta) * mu(v); break;
    }
    out += pi(v) * conditional;
  }
  return out;
}

WaldResult wald_check(const SemiMarkovKernel& kernel, StepFunction f, std::size_t v0, std::size_t n_cycles,
                      std::uint64_t seed, unsigned workers) {
  const auto pi = irreducible_pi(kernel, v0);
  if (n_cycles < 2) fail(ErrorKind::InvalidArgument, "need at least two cycles");
  const double drift = theta(kernel, pi);
  const auto sums = harvest_cycle_sums(kernel, v0, n_cycles, seed, workers,
                                       [f, drift](double v, double x) { return evaluate(f, v, x, drift); });
  const auto stats = mean_and_error(sums);
  return {stats.mean, stationary_step_mean(kernel, pi, f, drift) / pi(v0), stats.std_error};
}

}  // namespace smlab
