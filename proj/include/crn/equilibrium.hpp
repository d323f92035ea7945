#pragma once

#include "crn/kinetics.hpp"
#include "crn/network.hpp"
#include "crn/types.hpp"

#include <optional>
#include <vector>

namespace crn {

/// Mass-action right-hand side sum_k kappa_k x^{y_k} (y_k' - y_k).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> ode_rhs(
    const ReactionNetwork& net, const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(net.num_species());
  for (int k = 0; k < net.num_reactions(); ++k) {
    rhs += deterministic_rate(net, k, x) * net.reaction_vector(k).template cast<Scalar>();
  }
  return rhs;
}

// sum_k kappa_k (A x^d)^{y_k} (y_k' - y_k).
Vector generalized_ode_rhs(const ReactionNetwork& net, const Vector& x, const Vector& d,
                           const Vector& A);

struct BalanceReport {
  bool balanced = false;
  // Per complex, inflow minus outflow (unscaled).
  std::vector<double> gaps;
  // max_z |in - out| / max(1, out)
  double max_rel_gap = 0.0;
};

/// Complex balance at c: for every complex z, the flux into z equals the
/// flux out of z. Decided on max_z |in - out| / max(1, out) <= tol.
BalanceReport is_complex_balanced(const ReactionNetwork& net, const Vector& c,
                                  double tol = 1e-9);

struct EquilibriumOptions {
  Vector x0;                    // empty: all ones
  std::optional<Vector> anchor;  // fixes the compatibility class; default x0
  double tol = 1e-12;
  int max_iter = 200;
  double balance_tol = 1e-9;
};

struct EquilibriumResult {
  Vector c;
  double residual_ode = 0.0;  // ||ode_rhs(c)||_inf
  double residual_cb = 0.0;   // max relative complex-balance gap
  bool complex_balanced = false;
  bool converged = false;
  int iterations = 0;
};

/// Positive equilibrium in the compatibility class of the anchor.
///
/// Damped Newton in u = ln x on the s independent components of the
/// right-hand side plus the conservation laws w . x = w . anchor. The
/// iterate stays positive by construction. Returns converged = false with
/// the best iterate if max_iter is exhausted or the line search stalls;
/// throws NumericalError when the Jacobian is singular.
EquilibriumResult find_positive_equilibrium(const ReactionNetwork& net,
                                            const EquilibriumOptions& options = {});

// c~_i = (c_i / A_i)^{1/d_i}: the equilibrium of the generalized ODE.
Vector generalized_equilibrium(const Vector& c, const Vector& d, const Vector& A);

}  // namespace crn
