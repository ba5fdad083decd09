#pragma once

// Test kernels and oracles that do not go through the library's own
// numerical routes. Oracles here use power iteration, first-passage linear
// systems and direct numerical convolution instead of the code under test.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "smlab/kernel.hpp"
#include "smlab/telegraph.hpp"

namespace fixtures {

using smlab::Deterministic;
using smlab::Exponential;
using smlab::GammaLaw;
using smlab::SemiMarkovKernel;
using smlab::SojournLaw;
using smlab::Uniform;

inline SemiMarkovKernel make_kernel(std::vector<double> states, const Eigen::MatrixXd& P,
                                    const std::vector<std::vector<std::optional<SojournLaw>>>& laws) {
  SemiMarkovKernel k;
  k.states = std::move(states);
  k.P = P;
  const auto m = k.states.size();
  k.laws.resize(m * m);
  for (std::size_t v = 0; v < m; ++v)
    for (std::size_t w = 0; w < m; ++w) k.law(v, w) = laws[v][w];
  return k;
}

inline Eigen::MatrixXd matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd P(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (const double x : row) P(i, j++) = x;
    ++i;
  }
  return P;
}

inline SemiMarkovKernel symmetric_telegraph() { return smlab::telegraph_kernel({1.0, -1.0, 1.0, 1.0, 1.0}); }
inline SemiMarkovKernel asymmetric_telegraph() { return smlab::telegraph_kernel({2.0, -1.0, 1.0, 2.0, 1.0}); }

// Aperiodic, spectrum (1, 0.4, 0.3), one law of every family.
inline SemiMarkovKernel three_state() {
  return make_kernel({5.0, 3.0, 1.0}, matrix({{0.6, 0.2, 0.2}, {0.3, 0.5, 0.2}, {0.2, 0.2, 0.6}}),
                     {{Exponential{1.0}, GammaLaw{2.0, 2.0}, Uniform{0.0, 1.0}},
                      {Deterministic{0.5}, Exponential{2.0}, GammaLaw{3.0, 2.0}},
                      {Uniform{0.5, 1.5}, GammaLaw{4.0, 2.0}, Deterministic{1.0}}});
}

// Aperiodic with a negative second eigenvalue (-0.3).
inline SemiMarkovKernel two_state() {
  return make_kernel({1.0, -2.0}, matrix({{0.3, 0.7}, {0.6, 0.4}}),
                     {{Exponential{2.0}, Uniform{0.0, 2.0}}, {GammaLaw{2.0, 2.0}, Deterministic{0.5}}});
}

// Both rows (1/2, 1/2): the embedded chain is i.i.d., all lag >= 1 covariances vanish.
inline SemiMarkovKernel equal_rows() {
  return make_kernel({1.0, -1.0}, matrix({{0.5, 0.5}, {0.5, 0.5}}),
                     {{Exponential{1.0}, Exponential{1.0}}, {Exponential{1.0}, Exponential{1.0}}});
}

inline SemiMarkovKernel deterministic_cycle() {
  return make_kernel({1.0, -1.0}, matrix({{0.0, 1.0}, {1.0, 0.0}}),
                     {{std::nullopt, Deterministic{1.0}}, {Deterministic{1.0}, std::nullopt}});
}

// ---------------------------------------------------------------------------
// Oracles

// Invariant law by averaging powers of the lazy chain (P + I) / 2, which
// converges for any irreducible P, periodic or not.
inline Eigen::VectorXd power_pi(const Eigen::MatrixXd& P) {
  const auto m = P.rows();
  const Eigen::MatrixXd lazy = 0.5 * (P + Eigen::MatrixXd::Identity(m, m));
  Eigen::RowVectorXd x = Eigen::RowVectorXd::Constant(m, 1.0 / static_cast<double>(m));
  for (int i = 0; i < 20000; ++i) x = x * lazy;
  return x.transpose();
}

inline Eigen::MatrixXd moments(const SemiMarkovKernel& k, bool second) {
  const auto m = k.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t v = 0; v < m; ++v)
    for (std::size_t w = 0; w < m; ++w) {
      const auto& law = k.law(v, w);
      if (!law) continue;
      // Moments by family written out again rather than taken from the library.
      double m1 = 0.0, m2 = 0.0;
      if (const auto* e = std::get_if<Exponential>(&*law)) {
        m1 = 1.0 / e->rate;
        m2 = 2.0 / (e->rate * e->rate);
      } else if (const auto* g = std::get_if<GammaLaw>(&*law)) {
        m1 = g->shape / g->rate;
        m2 = g->shape * (g->shape + 1.0) / (g->rate * g->rate);
      } else if (const auto* u = std::get_if<Uniform>(&*law)) {
        m1 = 0.5 * (u->a + u->b);
        m2 = (u->a * u->a + u->a * u->b + u->b * u->b) / 3.0;
      } else {
        const double c = std::get<Deterministic>(*law).c;
        m1 = c;
        m2 = c * c;
      }
      out(v, w) = second ? m2 : m1;
    }
  return out;
}

struct Exact {
  Eigen::VectorXd pi;
  double theta;
  double mu;
  double gamma2;  // from the regenerative cycle second moment at state 0
};

// gamma^2 = pi_{v0} E[(cycle sum of eta)^2 | V_0 = v0] solved exactly via
// first-passage equations:
//   a_v = sum_u p_vu [c_v m_vu + 1{u != v0} a_u]
//   b_v = sum_u p_vu [c_v^2 m2_vu + 1{u != v0} (2 c_v m_vu a_u + b_u)]
inline Exact exact_limits(const SemiMarkovKernel& k, std::size_t v0 = 0) {
  const auto m = static_cast<Eigen::Index>(k.size());
  Exact out;
  out.pi = power_pi(k.P);
  const Eigen::MatrixXd m1 = moments(k, false);
  const Eigen::MatrixXd m2 = moments(k, true);
  const Eigen::VectorXd mu_v = (k.P.array() * m1.array()).rowwise().sum();
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = k.states[i];
  out.mu = out.pi.dot(mu_v);
  out.theta = out.pi.dot((v.array() * mu_v.array()).matrix()) / out.mu;
  const Eigen::VectorXd c = v.array() - out.theta;

  Eigen::MatrixXd avoid = k.P;
  avoid.col(static_cast<Eigen::Index>(v0)).setZero();
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m) - avoid;
  const Eigen::VectorXd a = A.partialPivLu().solve((mu_v.array() * c.array()).matrix());
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double s = 0.0;
    for (Eigen::Index u = 0; u < m; ++u) {
      s += k.P(i, u) * c(i) * c(i) * m2(i, u);
      if (u != static_cast<Eigen::Index>(v0)) s += k.P(i, u) * 2.0 * c(i) * m1(i, u) * a(u);
    }
    rhs(i) = s;
  }
  const Eigen::VectorXd b = A.partialPivLu().solve(rhs);
  out.gamma2 = out.pi(static_cast<Eigen::Index>(v0)) * b(static_cast<Eigen::Index>(v0));
  return out;
}

// max_w (1/2) |P^n(w, .) - pi|, by repeated multiplication.
inline double tv_by_powers(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi, int n) {
  Eigen::MatrixXd Pn = Eigen::MatrixXd::Identity(P.rows(), P.cols());
  for (int i = 0; i < n; ++i) Pn = Pn * P;
  double worst = 0.0;
  for (Eigen::Index w = 0; w < P.rows(); ++w)
    worst = std::max(worst, 0.5 * (Pn.row(w).transpose() - pi).cwiseAbs().sum());
  return worst;
}

// P{N(t) = n | V(0) = v1} for the alternating Poisson process by
// uniformization of the pure-birth chain with alternating rates.
inline double pmf_uniformization(double l1, double l2, double t, int n) {
  const double L = std::max(l1, l2);
  // p[j] = probability of being at level j after the current number of jumps.
  std::vector<double> p(n + 2, 0.0);
  p[0] = 1.0;
  double total = 0.0;
  double log_poisson = -L * t;
  for (int step = 0; step < 4000; ++step) {
    if (step > 0) {
      std::vector<double> next(n + 2, 0.0);
      for (int j = 0; j <= n; ++j) {
        const double rate = (j % 2 == 0) ? l1 : l2;
        next[j] += p[j] * (1.0 - rate / L);
        next[j + 1] += p[j] * rate / L;
      }
      p = std::move(next);
      log_poisson += std::log(L * t) - std::log(static_cast<double>(step));
    }
    total += std::exp(log_poisson) * p[n];
    if (step > L * t + 60.0 && std::exp(log_poisson) < 1e-300) break;
  }
  return total;
}

// n = 1 by direct numerical convolution: int_0^t l1 e^{-l1 s} e^{-l2 (t - s)} ds
// with the composite Simpson rule.
inline double pmf_one_convolution(double l1, double l2, double t) {
  const int N = 20000;
  const double h = t / N;
  double s = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double x = i * h;
    const double f = l1 * std::exp(-l1 * x) * std::exp(-l2 * (t - x));
    s += f * (i == 0 || i == N ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0));
  }
  return s * h / 3.0;
}

inline double poisson_pmf(double mean, int n) {
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

}  // namespace fixtures
