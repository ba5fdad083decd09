#include "smlab/simulate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "smlab/errors.hpp"

namespace smlab {

namespace {

void check_time(const Trajectory& traj, double t) {
  if (!(t >= 0.0)) fail(ErrorKind::InvalidArgument, fmt::format("time {} is negative", t));
  if (t > traj.horizon)
    fail(ErrorKind::HorizonExceeded, fmt::format("time {} beyond trajectory horizon {}", t, traj.horizon));
}

}  // namespace

TransitionSampler::TransitionSampler(const SemiMarkovKernel& kernel)
    : values_(kernel.states),
      cumulative_(kernel.size() * kernel.size()),
      last_positive_(kernel.size()),
      laws_(kernel.size() * kernel.size(), Deterministic{1.0}) {
  const auto m = kernel.size();
  for (std::size_t v = 0; v < m; ++v) {
    double acc = 0.0;
    for (std::size_t w = 0; w < m; ++w) {
      const double p = kernel.P(v, w);
      acc += p;
      cumulative_[v * m + w] = acc;
      if (p > 0.0) {
        last_positive_[v] = w;
        laws_[v * m + w] = *kernel.law(v, w);
      }
    }
  }
}

std::size_t TransitionSampler::initial(const InitialLaw& law, Rng& rng) const {
  if (const auto* index = std::get_if<std::size_t>(&law)) {
    if (*index >= size()) fail(ErrorKind::InvalidArgument, fmt::format("initial state {} out of range", *index));
    return *index;
  }
  const auto& dist = std::get<Eigen::VectorXd>(law);
  if (static_cast<std::size_t>(dist.size()) != size())
    fail(ErrorKind::InvalidArgument, "initial distribution has the wrong length");
  const double u = rng.uniform() * dist.sum();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t v = 0; v < size(); ++v) {
    if (dist(v) <= 0.0) continue;
    acc += dist(v);
    last = v;
    if (u < acc) return v;
  }
  return last;
}

std::size_t TransitionSampler::next_state(std::size_t from, Rng& rng) const {
  const auto m = size();
  const double u = rng.uniform();
  const double* row = cumulative_.data() + from * m;
  // Rows are tiny; a linear scan beats anything cleverer.
  for (std::size_t w = 0; w < m; ++w)
    if (u < row[w]) return w;
  return last_positive_[from];
}

double TransitionSampler::sojourn(std::size_t from, std::size_t to, Rng& rng) const {
  return sample_sojourn(laws_[from * size() + to], rng);
}

Trajectory sample_markov_renewal(const TransitionSampler& sampler, const InitialLaw& initial, const SampleMode& mode,
                                 Rng& rng) {
  Trajectory traj;
  traj.values = sampler.values();
  std::size_t state = sampler.initial(initial, rng);
  traj.states.push_back(state);
  traj.arrivals.push_back(0.0);
  double clock = 0.0;

  auto step = [&] {
    const std::size_t next = sampler.next_state(state, rng);
    const double xi = sampler.sojourn(state, next, rng);
    clock += xi;
    traj.states.push_back(next);
    traj.sojourns.push_back(xi);
    traj.arrivals.push_back(clock);
    state = next;
  };

  if (const auto* n = std::get_if<NSteps>(&mode)) {
    traj.states.reserve(n->count + 1);
    traj.sojourns.reserve(n->count);
    traj.arrivals.reserve(n->count + 1);
    for (std::size_t k = 0; k < n->count; ++k) step();
  } else {
    const double horizon = std::get<UntilTime>(mode).horizon;
    if (!(horizon > 0.0) || !std::isfinite(horizon))
      fail(ErrorKind::InvalidArgument, fmt::format("horizon {} must be positive", horizon));
    // One arrival past the horizon so N(t) and R(t) are defined on [0, T].
    while (clock <= horizon) step();
  }
  traj.horizon = clock;
  return traj;
}

Trajectory sample_markov_renewal(const SemiMarkovKernel& kernel, const InitialLaw& initial, const SampleMode& mode,
                                 std::uint64_t seed) {
  const TransitionSampler sampler(kernel);
  Rng rng(seed);
  return sample_markov_renewal(sampler, initial, mode, rng);
}

std::size_t counting(const Trajectory& traj, double t) {
  check_time(traj, t);
  const auto it = std::upper_bound(traj.arrivals.begin(), traj.arrivals.end(), t);
  return static_cast<std::size_t>(it - traj.arrivals.begin()) - 1;
}

double semi_markov_value(const Trajectory& traj, double t) { return traj.values[traj.states[counting(traj, t)]]; }

double residual_life(const Trajectory& traj, double t) { return t - traj.arrivals[counting(traj, t)]; }

std::vector<double> integral_path(const Trajectory& traj, std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  std::size_t k = 0;
  double at_arrival = 0.0;  // X(S_k)
  double previous = 0.0;
  for (const double t : grid) {
    if (!out.empty() && t < previous) fail(ErrorKind::InvalidArgument, "grid must be non-decreasing");
    check_time(traj, t);
    previous = t;
    while (k + 1 < traj.arrivals.size() && traj.arrivals[k + 1] <= t) {
      at_arrival += traj.values[traj.states[k]] * traj.sojourns[k];
      ++k;
    }
    out.push_back(at_arrival + traj.values[traj.states[k]] * (t - traj.arrivals[k]));
  }
  return out;
}

std::vector<double> scaled_path(const Trajectory& traj, double lambda, double theta, std::span<const double> grid) {
  if (!(lambda > 0.0)) fail(ErrorKind::InvalidArgument, "lambda must be positive");
  std::vector<double> scaled(grid.begin(), grid.end());
  for (auto& t : scaled) t *= lambda;
  auto path = integral_path(traj, scaled);
  const double root = std::sqrt(lambda);
  for (std::size_t i = 0; i < path.size(); ++i) path[i] = (path[i] - theta * scaled[i]) / root;
  return path;
}

std::vector<double> scaled_integral_path(const TransitionSampler& sampler, double lambda, double theta,
                                         std::span<const double> grid, Rng& rng, const InitialLaw& initial) {
  if (!(lambda > 0.0)) fail(ErrorKind::InvalidArgument, "lambda must be positive");
  if (grid.empty()) return {};
  const double t_max = *std::max_element(grid.begin(), grid.end());
  const Trajectory traj = t_max > 0.0 ? sample_markov_renewal(sampler, initial, UntilTime{lambda * t_max}, rng)
                                      : sample_markov_renewal(sampler, initial, NSteps{0}, rng);
  return scaled_path(traj, lambda, theta, grid);
}

std::vector<double> scaled_integral_path(const SemiMarkovKernel& kernel, double lambda, double theta,
                                         std::span<const double> grid, std::uint64_t seed,
                                         const InitialLaw& initial) {
  const TransitionSampler sampler(kernel);
  Rng rng(seed);
  return scaled_integral_path(sampler, lambda, theta, grid, rng, initial);
}

}  // namespace smlab
