#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "smlab/kernel.hpp"
#include "smlab/rng.hpp"

namespace smlab {

struct NSteps {
  std::size_t count;
};
struct UntilTime {
  double horizon;
};
using SampleMode = std::variant<NSteps, UntilTime>;

/// Starting state: a fixed index, or a probability vector to draw it from.
using InitialLaw = std::variant<std::size_t, Eigen::VectorXd>;

/// A realized Markov renewal path (V_k, S_k).
///
/// states[k] is V_k for k = 0..K, sojourns[k-1] is xi_k, arrivals[k] is S_k
/// with S_0 = 0. `values` carries the kernel's velocity labels so the derived
/// processes can be evaluated without the kernel.
struct Trajectory {
  std::vector<double> values;
  std::vector<std::size_t> states;
  std::vector<double> sojourns;
  std::vector<double> arrivals;
  double horizon = 0.0;

  std::size_t initial_state() const { return states.front(); }
  std::size_t steps() const { return sojourns.size(); }
};

/// Draws next states and sojourns for a validated kernel: state first from
/// row P[v], then the sojourn from F_{v,w}.
class TransitionSampler {
 public:
  explicit TransitionSampler(const SemiMarkovKernel& kernel);

  std::size_t size() const { return values_.size(); }
  double value(std::size_t state) const { return values_[state]; }
  const std::vector<double>& values() const { return values_; }

  std::size_t initial(const InitialLaw& law, Rng& rng) const;
  std::size_t next_state(std::size_t from, Rng& rng) const;
  double sojourn(std::size_t from, std::size_t to, Rng& rng) const;

 private:
  std::vector<double> values_;
  std::vector<double> cumulative_;  // row-major running row sums
  std::vector<std::size_t> last_positive_;
  std::vector<SojournLaw> laws_;  // row-major; unused where p = 0
};

Trajectory sample_markov_renewal(const SemiMarkovKernel& kernel, const InitialLaw& initial, const SampleMode& mode,
                                 std::uint64_t seed);
Trajectory sample_markov_renewal(const TransitionSampler& sampler, const InitialLaw& initial, const SampleMode& mode,
                                 Rng& rng);

/// N(t) = max{k : S_k <= t}.
std::size_t counting(const Trajectory& traj, double t);

/// V(t) = V_{N(t)}; right-continuous at arrivals.
double semi_markov_value(const Trajectory& traj, double t);

/// X(t) = integral of V over [0, t] on an increasing grid, by one forward sweep.
std::vector<double> integral_path(const Trajectory& traj, std::span<const double> grid);

/// R(t) = t - S_{N(t)}.
double residual_life(const Trajectory& traj, double t);

/// X_lambda(t) = (X(lambda t) - theta lambda t) / sqrt(lambda) on `grid`,
/// evaluated on an existing trajectory covering lambda * max(grid).
std::vector<double> scaled_path(const Trajectory& traj, double lambda, double theta, std::span<const double> grid);

/// X_lambda(t) = (X(lambda t) - theta lambda t) / sqrt(lambda) on `grid`,
/// from a fresh trajectory covering lambda * max(grid).
std::vector<double> scaled_integral_path(const SemiMarkovKernel& kernel, double lambda, double theta,
                                         std::span<const double> grid, std::uint64_t seed,
                                         const InitialLaw& initial = std::size_t{0});
std::vector<double> scaled_integral_path(const TransitionSampler& sampler, double lambda, double theta,
                                         std::span<const double> grid, Rng& rng, const InitialLaw& initial);

}  // namespace smlab
