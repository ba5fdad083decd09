#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "smlab/kernel.hpp"
#include "smlab/parallel.hpp"

namespace smlab {

enum class LimitMethod { Series, Cycle, AlternatingClosedForm };

std::string to_string(LimitMethod method);

/// Drift, mean stationary sojourn and limit variance of the centered
/// integral. X_lambda converges to sqrt(diffusion) W with diffusion = gamma2 / mu.
struct LimitParameters {
  double theta = 0.0;
  double mu = 0.0;
  double gamma2 = 0.0;
  double diffusion = 0.0;
  LimitMethod method = LimitMethod::Series;
  double gamma2_std_error = 0.0;  // non-zero only for the cycle method
};

double theta(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi);

double mean_sojourn(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi);

/// E_pi[eta_1 eta_{1+k}] for eta_k = (V_{k-1} - theta) xi_k; k = 0 is the variance.
double autocovariance(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi, double theta, int k);

/// cov(0) + 2 sum_{k>=1} cov(k), stopped at the first K whose geometric tail
/// bound |cov(K)| slem / (1 - slem) falls below `tol`. Throws PeriodicChain.
double gamma2_series(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi, double theta, double tol = 1e-10);

/// Monte Carlo settings for periodic kernels that are not a single cycle.
struct CycleFallback {
  std::size_t n_cycles = 100000;
  std::uint64_t seed = 42;
  unsigned workers = kAutoWorkers;
};

LimitParameters limit_parameters(const SemiMarkovKernel& kernel, double tol = 1e-10, const CycleFallback& fallback = {});

/// lim P{V(t) = v} = pi_v mu_v / sum_w pi_w mu_w.
Eigen::VectorXd occupancy_limit(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi);

}  // namespace smlab
