#pragma once

#include <array>
#include <cmath>

#include "smlab/errors.hpp"

namespace smlab {

struct QuadratureResult {
  double value;
  double error_estimate;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (non-negative half).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780, 0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
QuadratureResult gauss_kronrod_15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <typename F>
QuadratureResult adaptive(F& f, double a, double b, double tol, int depth) {
  const auto whole = gauss_kronrod_15(f, a, b);
  if (whole.error_estimate <= tol) return whole;
  if (depth == 0) fail(ErrorKind::QuadratureFailure, "recursion limit reached before tolerance");
  const double mid = 0.5 * (a + b);
  const auto left = adaptive(f, a, mid, 0.5 * tol, depth - 1);
  const auto right = adaptive(f, mid, b, 0.5 * tol, depth - 1);
  return {left.value + right.value, left.error_estimate + right.error_estimate};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [a, b] to absolute tolerance
/// `tol`. Throws QuadratureFailure when bisection runs out before the
/// estimated error drops below the tolerance.
template <typename F>
QuadratureResult integrate(F f, double a, double b, double tol, int max_depth = 40) {
  return detail::adaptive(f, a, b, tol, max_depth);
}

}  // namespace smlab
