#include "smlab/limits.hpp"

#include <cmath>
#include <vector>

#include "smlab/errors.hpp"
#include "smlab/regen.hpp"
#include "smlab/telegraph.hpp"

namespace smlab {

namespace {

Eigen::VectorXd labels(const SemiMarkovKernel& kernel) {
  return Eigen::Map<const Eigen::VectorXd>(kernel.states.data(), static_cast<Eigen::Index>(kernel.size()));
}

// Pieces of cov(k) = a^T M P^{k-1} b with a = pi (v - theta),
// M = P .* m (one-step sojourn means), b = (w - theta) mu_w.
struct CovarianceTerms {
  Eigen::RowVectorXd left;  // a^T M
  Eigen::VectorXd right;    // b
};

CovarianceTerms covariance_terms(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi, double theta) {
  const Eigen::VectorXd centred = labels(kernel).array() - theta;
  const Eigen::MatrixXd M = kernel.P.cwiseProduct(kernel.first_moments());
  return {pi.cwiseProduct(centred).transpose() * M, centred.cwiseProduct(kernel.mean_sojourns())};
}

}  // namespace

std::string to_string(LimitMethod method) {
  switch (method) {
    case LimitMethod::Series: return "series";
    case LimitMethod::Cycle: return "cycle";
    case LimitMethod::AlternatingClosedForm: return "alternating_closed_form";
  }
  return "unknown";
}

double theta(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi) {
  const Eigen::VectorXd weights = pi.cwiseProduct(kernel.mean_sojourns());
  return weights.dot(labels(kernel)) / weights.sum();
}

double mean_sojourn(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi) { return pi.dot(kernel.mean_sojourns()); }

double autocovariance(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi, double theta, int k) {
  if (k < 0) fail(ErrorKind::InvalidArgument, "lag must be non-negative");
  if (k == 0) {
    const Eigen::ArrayXd centred = labels(kernel).array() - theta;
    return (pi.array() * centred.square() * kernel.mean_square_sojourns().array()).sum();
  }
  const auto terms = covariance_terms(kernel, pi, theta);
  Eigen::VectorXd propagated = terms.right;
  for (int j = 1; j < k; ++j) propagated = kernel.P * propagated;
  return terms.left.dot(propagated);
}

double gamma2_series(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi, double theta, double tol) {
  if (const int d = chain_period(kernel.P); d > 1)
    fail(ErrorKind::PeriodicChain, "covariance series diverges for a periodic chain; use the cycle estimator");
  if (!(tol > 0.0)) fail(ErrorKind::InvalidArgument, "tolerance must be positive");
  const double rho = second_largest_eigenvalue_modulus(kernel.P);
  if (rho >= 1.0) fail(ErrorKind::PeriodicChain, "slem is 1; the series does not converge");

  const auto terms = covariance_terms(kernel, pi, theta);
  double sum = autocovariance(kernel, pi, theta, 0);
  Eigen::VectorXd propagated = terms.right;
  constexpr int kMaxLags = 10'000'000;
  for (int k = 1; k <= kMaxLags; ++k) {
    const double cov = terms.left.dot(propagated);
    sum += 2.0 * cov;
    // The remaining tail 2 * sum_{j>k} cov(j) is about 2 |cov(k)| rho / (1 - rho).
    if (2.0 * std::abs(cov) * rho / (1.0 - rho) < tol) return sum;
    propagated = kernel.P * propagated;
  }
  fail(ErrorKind::InvalidArgument, "covariance series did not reach tolerance");
}

LimitParameters limit_parameters(const SemiMarkovKernel& kernel, double tol, const CycleFallback& fallback) {
  const auto structure = validate_kernel(kernel);
  if (!structure.irreducible) fail(ErrorKind::NotIrreducible, "limit parameters need an irreducible kernel");
  const auto& pi = structure.pi;

  LimitParameters out;
  if (structure.period == 1) {
    out.theta = theta(kernel, pi);
    out.mu = mean_sojourn(kernel, pi);
    out.gamma2 = gamma2_series(kernel, pi, out.theta, tol);
    out.method = LimitMethod::Series;
  } else if (is_cyclic_permutation(kernel.P)) {
    std::vector<double> values;
    std::vector<double> means;
    std::vector<double> variances;
    std::size_t v = 0;
    do {
      std::size_t next = 0;
      while (kernel.P(v, next) != 1.0) ++next;
      const auto moments = sojourn_moments(*kernel.law(v, next));
      values.push_back(kernel.states[v]);
      means.push_back(moments.m1);
      variances.push_back(moments.variance());
      v = next;
    } while (v != 0);
    const auto closed = alternating_limits(values, means, variances);
    out.theta = closed.theta;
    out.mu = closed.mu;
    out.gamma2 = closed.gamma2;
    out.method = LimitMethod::AlternatingClosedForm;
  } else {
    out.theta = theta(kernel, pi);
    out.mu = mean_sojourn(kernel, pi);
    const auto estimate = estimate_gamma2_cycles(kernel, 0, fallback.n_cycles, out.theta, fallback.seed, fallback.workers);
    out.gamma2 = estimate.estimate;
    out.gamma2_std_error = estimate.std_error;
    out.method = LimitMethod::Cycle;
  }
  out.diffusion = out.gamma2 / out.mu;
  return out;
}

Eigen::VectorXd occupancy_limit(const SemiMarkovKernel& kernel, const Eigen::VectorXd& pi) {
  const Eigen::VectorXd weights = pi.cwiseProduct(kernel.mean_sojourns());
  return weights / weights.sum();
}

}  // namespace smlab
