#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "smlab/rng.hpp"

namespace smlab {

// Sojourn-time families. Each has closed-form first and second moments.
struct Exponential {
  double rate;
  bool operator==(const Exponential&) const = default;
};
struct GammaLaw {
  double shape;
  double rate;
  bool operator==(const GammaLaw&) const = default;
};
struct Uniform {
  double a;
  double b;
  bool operator==(const Uniform&) const = default;
};
struct Deterministic {
  double c;
  bool operator==(const Deterministic&) const = default;
};

using SojournLaw = std::variant<Exponential, GammaLaw, Uniform, Deterministic>;

struct SojournMoments {
  double m1;  // E[xi]
  double m2;  // E[xi^2]
  double variance() const { return m2 - m1 * m1; }
};

/// Throws InvalidSojournLaw when a parameter is outside its family's range.
void check_law(const SojournLaw& law);

SojournMoments sojourn_moments(const SojournLaw& law);

double sample_sojourn(const SojournLaw& law, Rng& rng);

std::string family_name(const SojournLaw& law);

/// Finite-state semi-Markov kernel Q_{vw}(t) = p_{vw} F_{vw}(t).
///
/// Plain data; validate_kernel() checks the invariants. `laws` is row-major
/// m*m and holds a law exactly where P has a positive entry.
struct SemiMarkovKernel {
  std::vector<double> states;
  Eigen::MatrixXd P;
  std::vector<std::optional<SojournLaw>> laws;

  std::size_t size() const { return states.size(); }
  const std::optional<SojournLaw>& law(std::size_t from, std::size_t to) const {
    return laws[from * states.size() + to];
  }
  std::optional<SojournLaw>& law(std::size_t from, std::size_t to) {
    return laws[from * states.size() + to];
  }

  /// m_{vw} and m2_{vw} tables (zero where p_{vw} = 0).
  Eigen::MatrixXd first_moments() const;
  Eigen::MatrixXd second_moments() const;
  /// mu_v = E[xi_1 | V_0 = v] and E[xi_1^2 | V_0 = v].
  Eigen::VectorXd mean_sojourns() const;
  Eigen::VectorXd mean_square_sojourns() const;
};

struct ChainStructure {
  bool irreducible = false;
  int period = 1;
  Eigen::VectorXd pi;  // empty when the chain is not irreducible
  double slem = 0.0;
};

/// Checks the kernel and reports irreducibility, period, invariant law and
/// second-largest eigenvalue modulus. Reducibility is reported, not thrown.
ChainStructure validate_kernel(const SemiMarkovKernel& kernel);

bool is_irreducible(const Eigen::MatrixXd& P);

/// gcd of cycle lengths through state 0, from BFS levels of the support digraph.
int chain_period(const Eigen::MatrixXd& P);

double second_largest_eigenvalue_modulus(const Eigen::MatrixXd& P);

/// Solves pi P = pi, sum(pi) = 1 directly. Throws NotIrreducible.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P);

/// max_w (1/2) sum_v |P^n(w, v) - pi_v|. Throws PeriodicChain.
double tv_to_stationary(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi, int n);

/// True when P is a permutation matrix consisting of a single m-cycle.
bool is_cyclic_permutation(const Eigen::MatrixXd& P);

}  // namespace smlab
