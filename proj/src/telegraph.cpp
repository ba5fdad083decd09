#include "smlab/telegraph.hpp"

#include <cmath>

#include <fmt/format.h>

#include "smlab/errors.hpp"
#include "smlab/quadrature.hpp"

namespace smlab {

void check_spec(const TelegraphSpec& spec) {
  if (!std::isfinite(spec.v1) || !std::isfinite(spec.v2) || spec.v1 == spec.v2)
    fail(ErrorKind::InvalidArgument, "telegraph velocities must be finite and distinct");
  if (!(spec.lambda1 > 0.0) || !(spec.lambda2 > 0.0) || !std::isfinite(spec.lambda1) || !std::isfinite(spec.lambda2))
    fail(ErrorKind::InvalidArgument, "telegraph rates must be positive");
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) fail(ErrorKind::InvalidArgument, "initial probability p must be in [0, 1]");
}

SemiMarkovKernel alternating_kernel(std::span<const double> values, std::span<const SojournLaw> laws) {
  const auto m = values.size();
  if (m < 2) fail(ErrorKind::InvalidKernel, "an alternating kernel needs at least two states");
  if (laws.size() != m) fail(ErrorKind::InvalidKernel, fmt::format("expected {} sojourn laws, got {}", m, laws.size()));
  SemiMarkovKernel kernel;
  kernel.states.assign(values.begin(), values.end());
  kernel.P = Eigen::MatrixXd::Zero(m, m);
  kernel.laws.assign(m * m, std::nullopt);
  for (std::size_t i = 0; i < m; ++i) {
    const auto next = (i + 1) % m;
    kernel.P(i, next) = 1.0;
    kernel.law(i, next) = laws[i];
  }
  return kernel;
}

SemiMarkovKernel telegraph_kernel(const TelegraphSpec& spec) {
  check_spec(spec);
  const double values[] = {spec.v1, spec.v2};
  const SojournLaw laws[] = {Exponential{spec.lambda1}, Exponential{spec.lambda2}};
  return alternating_kernel(values, laws);
}

AlternatingLimits alternating_limits(std::span<const double> values, std::span<const double> means,
                                     std::span<const double> variances) {
  const auto m = values.size();
  if (m == 0 || means.size() != m || variances.size() != m)
    fail(ErrorKind::InvalidArgument, "values, means and variances must have the same non-zero length");
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    weighted += values[i] * means[i];
    total += means[i];
  }
  const double theta = weighted / total;
  double gamma2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) gamma2 += variances[i] * (values[i] - theta) * (values[i] - theta);
  return {theta, total / static_cast<double>(m), gamma2 / static_cast<double>(m)};
}

double telegraph_state_law(const TelegraphSpec& spec, double t) {
  check_spec(spec);
  if (!(t >= 0.0)) fail(ErrorKind::InvalidArgument, "time must be non-negative");
  const double total = spec.lambda1 + spec.lambda2;
  return spec.lambda2 / total +
         (spec.p * spec.lambda1 - (1.0 - spec.p) * spec.lambda2) / total * std::exp(-total * t);
}

double w_integral(double a, double b, double x, double log_scale) {
  if (!(a > 0.0) || !(b > 0.0)) fail(ErrorKind::InvalidArgument, "W indices must be positive");
  const double log_norm = log_scale - std::lgamma(a) - std::lgamma(b);
  auto integrand = [&](double u) {
    double log_f = log_norm - x * u;
    if (a != 1.0) log_f += (a - 1.0) * std::log(u);
    if (b != 1.0) log_f += (b - 1.0) * std::log1p(-u);
    return std::exp(log_f);
  };
  return integrate(integrand, 0.0, 1.0, 1e-12).value;
}

double alternating_poisson_pmf(double lambda1, double lambda2, double t, int n) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) fail(ErrorKind::InvalidArgument, "rates must be positive");
  if (!(t > 0.0)) fail(ErrorKind::InvalidArgument, "t must be positive");
  if (n < 0) fail(ErrorKind::InvalidArgument, "n must be non-negative");
  if (n == 0) return std::exp(-lambda1 * t);
  if (lambda1 == lambda2) {
    const double rate = lambda1 * t;
    return std::exp(n * std::log(rate) - rate - std::lgamma(n + 1.0));
  }
  const int k = n / 2;
  // n = 2k: (l1 t)^k (l2 t)^k e^{-l1 t} W_{k,k+1}; n = 2k+1: (l1 t)^{k+1} (l2 t)^k e^{-l1 t} W_{k+1,k+1}.
  const int power1 = n % 2 == 0 ? k : k + 1;
  const double a = power1;
  const double b = k + 1;
  const double log_prefactor = power1 * std::log(lambda1 * t) + k * std::log(lambda2 * t) - lambda1 * t;
  return w_integral(a, b, t * (lambda2 - lambda1), log_prefactor);
}

TelegraphLimit telegraph_limit(const TelegraphSpec& spec) {
  check_spec(spec);
  const double total = spec.lambda1 + spec.lambda2;
  const double gap = spec.v1 - spec.v2;
  return {(spec.v1 * spec.lambda2 + spec.v2 * spec.lambda1) / total,
          2.0 * spec.lambda1 * spec.lambda2 * gap * gap / (total * total * total)};
}

}  // namespace smlab
