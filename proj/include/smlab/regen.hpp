#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "smlab/kernel.hpp"
#include "smlab/parallel.hpp"
#include "smlab/simulate.hpp"

namespace smlab {

/// One step (V_{k-1}, xi_k) of a Markov renewal path.
struct CycleStep {
  std::size_t state;
  double sojourn;
  bool operator==(const CycleStep&) const = default;
};

struct Cycle {
  std::vector<CycleStep> steps;
  std::size_t length() const { return steps.size(); }
};

/// A trajectory cut at the passage times tau_m = inf{k > tau_{m-1} : V_k = v0}.
///
/// When V_0 = v0 index 0 counts as tau_0 and the head is empty; otherwise the
/// head holds steps 1..tau_1. The tail holds the steps after the last passage.
struct CycleSet {
  std::size_t reference_state = 0;
  std::vector<CycleStep> head;
  std::vector<Cycle> cycles;
  std::vector<CycleStep> tail;

  bool no_complete_cycles() const { return cycles.empty(); }
};

CycleSet split_cycles(const Trajectory& traj, std::size_t v0);

/// head + cycles + tail, in order.
std::vector<CycleStep> concatenate(const CycleSet& set);

struct CycleSummary {
  std::size_t index;
  std::size_t length;
  double sum;     // sum of (V_{k-1} - theta) xi_k over the cycle
  double sum_sq;  // its square
};

std::vector<CycleSummary> summarize_cycles(const CycleSet& set, const std::vector<double>& values, double theta);

struct Gamma2Estimate {
  double estimate;
  double std_error;
  std::size_t n_cycles;
};

/// pi_{v0} E[(sum over a cycle of eta_k)^2 | V_0 = v0] from n_cycles cycles
/// harvested from paths started at v0. Cycles are produced in fixed-size
/// blocks with per-block streams, so the result does not depend on `workers`.
Gamma2Estimate estimate_gamma2_cycles(const SemiMarkovKernel& kernel, std::size_t v0, std::size_t n_cycles,
                                      double theta, std::uint64_t seed, unsigned workers = kAutoWorkers);

/// Fixed catalog of step functions f(v, x) for the Wald identity.
enum class StepFunction { One, X, VX, CenteredVX };

std::string to_string(StepFunction f);
StepFunction parse_step_function(const std::string& name);

double evaluate(StepFunction f, double v, double x, double theta);

struct WaldResult {
  double lhs;  // Monte Carlo mean of the cycle sum of f
  double rhs;  // E[tau_1 | v0] E_pi[f(V_0, S_1)] = pi_{v0}^-1 sum_v pi_v E[f(v, xi) | V_0 = v]
  double std_error;
};

WaldResult wald_check(const SemiMarkovKernel& kernel, StepFunction f, std::size_t v0, std::size_t n_cycles,
                      std::uint64_t seed, unsigned workers = kAutoWorkers);

/// Analytic E_pi[f(V_0, S_1)].
double stationary_step_mean(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi, StepFunction f, double theta);

}  // namespace smlab
