#pragma once

#include <span>
#include <vector>

#include "smlab/kernel.hpp"

namespace smlab {

/// Two-velocity telegraph process: velocity v1 held for Exp(lambda1) time,
/// then v2 for Exp(lambda2), alternating. p = P{V(0) = v1}.
struct TelegraphSpec {
  double v1 = 1.0;
  double v2 = -1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double p = 1.0;
  bool operator==(const TelegraphSpec&) const = default;
};

void check_spec(const TelegraphSpec& spec);

/// Alternating renewal kernel: v_i -> v_{i+1 mod m} with probability one and
/// sojourn laws[i] out of state i.
SemiMarkovKernel alternating_kernel(std::span<const double> values, std::span<const SojournLaw> laws);

SemiMarkovKernel telegraph_kernel(const TelegraphSpec& spec);

struct AlternatingLimits {
  double theta;
  double mu;
  double gamma2;
};

/// Closed-form drift, mean sojourn and limit variance of an alternating
/// renewal process from per-state sojourn means and variances.
AlternatingLimits alternating_limits(std::span<const double> values, std::span<const double> means,
                                     std::span<const double> variances);

/// P{V(t) = v1}.
double telegraph_state_law(const TelegraphSpec& spec, double t);

/// (Gamma(a) Gamma(b))^-1 int_0^1 u^(a-1) (1-u)^(b-1) e^(-x u) du, scaled by
/// exp(log_scale) inside the integrand so large prefactors do not overflow.
double w_integral(double a, double b, double x, double log_scale = 0.0);

/// P{N(t) = n | V(0) = v1} for the alternating Poisson process with rates
/// (lambda1, lambda2). n >= 1 goes through w_integral at x = t (lambda2 -
/// lambda1); that is the sign for which n = 1 reproduces the convolution
/// lambda1 (e^{-lambda2 t} - e^{-lambda1 t}) / (lambda1 - lambda2).
double alternating_poisson_pmf(double lambda1, double lambda2, double t, int n);

struct TelegraphLimit {
  double drift;
  double diffusion;
};

/// Drift and variance rate of the Brownian limit, straight from the
/// two-state closed forms (independent of the general kernel route).
TelegraphLimit telegraph_limit(const TelegraphSpec& spec);

}  // namespace smlab
