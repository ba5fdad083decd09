#include "smlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "smlab/errors.hpp"

namespace smlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<int> bfs_levels(const Eigen::MatrixXd& P, Eigen::Index start) {
  const auto m = P.rows();
  std::vector<int> level(m, -1);
  std::queue<Eigen::Index> queue;
  level[start] = 0;
  queue.push(start);
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop();
    for (Eigen::Index v = 0; v < m; ++v) {
      if (P(u, v) > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push(v);
      }
    }
  }
  return level;
}

}  // namespace

void check_law(const SojournLaw& law) {
  const bool ok = std::visit(
      overloaded{
          [](const Exponential& l) { return std::isfinite(l.rate) && l.rate > 0.0; },
          [](const GammaLaw& l) {
            return std::isfinite(l.shape) && std::isfinite(l.rate) && l.shape > 0.0 && l.rate > 0.0;
          },
          [](const Uniform& l) { return std::isfinite(l.b) && l.a >= 0.0 && l.b > l.a; },
          [](const Deterministic& l) { return std::isfinite(l.c) && l.c > 0.0; },
      },
      law);
  if (!ok) fail(ErrorKind::InvalidSojournLaw, "parameters out of range for family " + family_name(law));
}

SojournMoments sojourn_moments(const SojournLaw& law) {
  return std::visit(overloaded{
                        [](const Exponential& l) {
                          return SojournMoments{1.0 / l.rate, 2.0 / (l.rate * l.rate)};
                        },
                        [](const GammaLaw& l) {
                          return SojournMoments{l.shape / l.rate,
                                                l.shape * (l.shape + 1.0) / (l.rate * l.rate)};
                        },
                        [](const Uniform& l) {
                          return SojournMoments{0.5 * (l.a + l.b),
                                                (l.a * l.a + l.a * l.b + l.b * l.b) / 3.0};
                        },
                        [](const Deterministic& l) { return SojournMoments{l.c, l.c * l.c}; },
                    },
                    law);
}

double sample_sojourn(const SojournLaw& law, Rng& rng) {
  return std::visit(overloaded{
                        [&](const Exponential& l) { return rng.exponential(l.rate); },
                        [&](const GammaLaw& l) { return rng.gamma(l.shape, l.rate); },
                        [&](const Uniform& l) { return l.a + (l.b - l.a) * rng.uniform(); },
                        [](const Deterministic& l) { return l.c; },
                    },
                    law);
}

std::string family_name(const SojournLaw& law) {
  return std::visit(overloaded{
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const GammaLaw&) { return std::string("gamma"); },
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const Deterministic&) { return std::string("deterministic"); },
                    },
                    law);
}

Eigen::MatrixXd SemiMarkovKernel::first_moments() const {
  const auto m = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index v = 0; v < m; ++v)
    for (Eigen::Index w = 0; w < m; ++w)
      if (const auto& l = law(v, w); l && P(v, w) > 0.0) out(v, w) = sojourn_moments(*l).m1;
  return out;
}

Eigen::MatrixXd SemiMarkovKernel::second_moments() const {
  const auto m = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index v = 0; v < m; ++v)
    for (Eigen::Index w = 0; w < m; ++w)
      if (const auto& l = law(v, w); l && P(v, w) > 0.0) out(v, w) = sojourn_moments(*l).m2;
  return out;
}

Eigen::VectorXd SemiMarkovKernel::mean_sojourns() const {
  return P.cwiseProduct(first_moments()).rowwise().sum();
}

Eigen::VectorXd SemiMarkovKernel::mean_square_sojourns() const {
  return P.cwiseProduct(second_moments()).rowwise().sum();
}

bool is_irreducible(const Eigen::MatrixXd& P) {
  const auto m = P.rows();
  if (m == 0) return false;
  const auto forward = bfs_levels(P, 0);
  const Eigen::MatrixXd Pt = P.transpose();
  const auto backward = bfs_levels(Pt, 0);
  for (Eigen::Index v = 0; v < m; ++v)
    if (forward[v] < 0 || backward[v] < 0) return false;
  return true;
}

int chain_period(const Eigen::MatrixXd& P) {
  const auto level = bfs_levels(P, 0);
  int g = 0;
  for (Eigen::Index u = 0; u < P.rows(); ++u) {
    if (level[u] < 0) continue;
    for (Eigen::Index v = 0; v < P.cols(); ++v)
      if (P(u, v) > 0.0 && level[v] >= 0) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
  }
  return g == 0 ? 1 : g;
}

double second_largest_eigenvalue_modulus(const Eigen::MatrixXd& P) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(P, /*computeEigenvectors=*/false);
  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) moduli.push_back(std::abs(solver.eigenvalues()[i]));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  if (moduli.size() < 2) return 0.0;
  return std::clamp(moduli[1], 0.0, 1.0);
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P) {
  if (!is_irreducible(P)) fail(ErrorKind::NotIrreducible, "support digraph of P is not strongly connected");
  const auto m = P.rows();
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(m, m);
  A.row(m - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(m - 1) = 1.0;
  Eigen::VectorXd pi = A.fullPivLu().solve(b);
  // One refinement step brings the residual to machine precision.
  pi += A.fullPivLu().solve(b - A * pi);
  return pi;
}

double tv_to_stationary(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi, int n) {
  if (n < 0) fail(ErrorKind::InvalidArgument, "step count must be non-negative");
  if (const int d = chain_period(P); d > 1)
    fail(ErrorKind::PeriodicChain, fmt::format("chain has period {}", d));
  const auto m = P.rows();
  Eigen::MatrixXd Pn = Eigen::MatrixXd::Identity(m, m);
  for (int k = 0; k < n; ++k) Pn = Pn * P;
  double worst = 0.0;
  for (Eigen::Index w = 0; w < m; ++w)
    worst = std::max(worst, 0.5 * (Pn.row(w).transpose() - pi).cwiseAbs().sum());
  return worst;
}

bool is_cyclic_permutation(const Eigen::MatrixXd& P) {
  const auto m = P.rows();
  std::vector<Eigen::Index> next(m, -1);
  for (Eigen::Index v = 0; v < m; ++v) {
    for (Eigen::Index w = 0; w < m; ++w) {
      if (P(v, w) == 1.0) {
        next[v] = w;
      } else if (P(v, w) != 0.0) {
        return false;
      }
    }
    if (next[v] < 0) return false;
  }
  Eigen::Index v = 0;
  for (Eigen::Index step = 1; step <= m; ++step) {
    v = next[v];
    if (v == 0) return step == m;
  }
  return false;
}

ChainStructure validate_kernel(const SemiMarkovKernel& kernel) {
  const auto m = kernel.size();
  if (m < 2) fail(ErrorKind::InvalidKernel, "need at least two states");
  if (static_cast<std::size_t>(kernel.P.rows()) != m || static_cast<std::size_t>(kernel.P.cols()) != m)
    fail(ErrorKind::InvalidKernel, fmt::format("P must be {0}x{0}", m));
  if (kernel.laws.size() != m * m) fail(ErrorKind::InvalidKernel, "sojourn table must be m*m");
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(kernel.states[i])) fail(ErrorKind::InvalidKernel, fmt::format("state {} is not finite", i));
    for (std::size_t j = 0; j < i; ++j)
      if (kernel.states[i] == kernel.states[j])
        fail(ErrorKind::InvalidKernel, fmt::format("states {} and {} share the label {}", j, i, kernel.states[i]));
  }
  for (std::size_t v = 0; v < m; ++v) {
    double row = 0.0;
    for (std::size_t w = 0; w < m; ++w) {
      const double p = kernel.P(v, w);
      if (!(p >= 0.0)) fail(ErrorKind::InvalidStochasticMatrix, fmt::format("P row {} has a negative entry", v));
      row += p;
    }
    if (std::abs(row - 1.0) > 1e-9)
      fail(ErrorKind::InvalidStochasticMatrix, fmt::format("P row {} sums to {}", v, row));
  }
  for (std::size_t v = 0; v < m; ++v) {
    for (std::size_t w = 0; w < m; ++w) {
      const auto& law = kernel.law(v, w);
      if (kernel.P(v, w) > 0.0) {
        if (!law) fail(ErrorKind::MissingSojournLaw, fmt::format("no sojourn law for transition {} -> {}", v, w));
        check_law(*law);
      } else if (law) {
        fail(ErrorKind::InvalidKernel, fmt::format("sojourn law given for impossible transition {} -> {}", v, w));
      }
    }
  }

  ChainStructure out;
  out.irreducible = is_irreducible(kernel.P);
  out.period = chain_period(kernel.P);
  if (out.irreducible) out.pi = stationary_distribution(kernel.P);
  out.slem = second_largest_eigenvalue_modulus(kernel.P);
  return out;
}

}  // namespace smlab
