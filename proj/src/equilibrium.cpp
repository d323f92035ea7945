#include "crn/equilibrium.hpp"

#include "crn/errors.hpp"
#include "crn/structure.hpp"

#include <cmath>

namespace crn {

Vector generalized_ode_rhs(const ReactionNetwork& net, const Vector& x, const Vector& d,
                           const Vector& A) {
  Vector rhs = Vector::Zero(net.num_species());
  for (int k = 0; k < net.num_reactions(); ++k) {
    rhs += generalized_ode_rate(net, k, x, d, A) * net.reaction_vector(k).cast<double>();
  }
  return rhs;
}

BalanceReport is_complex_balanced(const ReactionNetwork& net, const Vector& c,
                                  double tol) {
  if (c.size() != net.num_species()) throw DomainError("c has wrong length");
  if ((c.array() <= 0.0).any()) throw DomainError("c must be strictly positive");
  std::vector<double> in(net.num_complexes(), 0.0), out(net.num_complexes(), 0.0);
  for (int k = 0; k < net.num_reactions(); ++k) {
    const double flux = deterministic_rate(net, k, c);
    out[net.source_index(k)] += flux;
    in[net.product_index(k)] += flux;
  }
  BalanceReport report;
  for (int z = 0; z < net.num_complexes(); ++z) {
    report.gaps.push_back(in[z] - out[z]);
    report.max_rel_gap =
        std::max(report.max_rel_gap, std::abs(in[z] - out[z]) / std::max(1.0, out[z]));
  }
  report.balanced = report.max_rel_gap <= tol;
  return report;
}

namespace {

// Minimum-norm Newton steps in u = ln x on W e^u = totals, so the main solve
// starts inside the compatibility class. Returns the best iterate found.
Vector project_onto_class(const Matrix& laws, const Vector& totals, Vector u) {
  auto residual = [&](const Vector& v) {
    return Vector(laws * v.array().exp().matrix() - totals);
  };
  Vector r = residual(u);
  for (int iter = 0; iter < 100; ++iter) {
    const double norm = r.norm();
    if (norm <= 1e-14 * std::max(1.0, totals.norm())) break;
    const Vector x = u.array().exp();
    const Matrix jac = laws * x.asDiagonal();
    Vector step = jac.completeOrthogonalDecomposition().solve(-r);
    const double longest = step.lpNorm<Eigen::Infinity>();
    if (longest > 5.0) step *= 5.0 / longest;
    bool accepted = false;
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      const Vector u_try = u + t * step;
      const Vector r_try = residual(u_try);
      if (std::isfinite(r_try.norm()) && r_try.norm() < (1.0 - 1e-4 * t) * norm) {
        u = u_try;
        r = r_try;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return u;
}

}  // namespace

EquilibriumResult find_positive_equilibrium(const ReactionNetwork& net,
                                            const EquilibriumOptions& options) {
  const int m = net.num_species();
  const Vector x0 = options.x0.size() == 0 ? Vector::Ones(m) : options.x0;
  if (x0.size() != m) throw DomainError("initial guess has wrong length");
  if ((x0.array() <= 0.0).any()) throw DomainError("initial guess must be positive");
  const Vector anchor = options.anchor.value_or(x0);
  if (anchor.size() != m) throw DomainError("anchor has wrong length");
  if ((anchor.array() < 0.0).any()) throw DomainError("anchor must be nonnegative");

  const std::vector<int> basis_reactions = stoich_basis_reactions(net);
  const int s = static_cast<int>(basis_reactions.size());
  Matrix basis(m, s);
  for (int j = 0; j < s; ++j) {
    basis.col(j) = net.reaction_vector(basis_reactions[j]).cast<double>();
  }
  const Matrix laws = conservation_laws(net);
  const Vector totals = laws * anchor;

  auto system = [&](const Vector& x) {
    Vector g(m);
    g.head(s) = basis.transpose() * ode_rhs(net, x);
    g.tail(m - s) = laws * x - totals;
    return g;
  };
  auto converged_at = [&](const Vector& x) {
    const double ode = ode_rhs(net, x).lpNorm<Eigen::Infinity>();
    double cons = 0.0;
    if (m > s) cons = (laws * x - totals).lpNorm<Eigen::Infinity>();
    const double cons_scale = std::max(1.0, totals.lpNorm<Eigen::Infinity>());
    return ode <= options.tol && cons <= 1e3 * options.tol * cons_scale;
  };

  Vector u = x0.array().log();
  if (m > s) u = project_onto_class(laws, totals, u);
  Vector x = u.array().exp();
  Vector g = system(x);
  double merit = 0.5 * g.squaredNorm();
  EquilibriumResult result;

  int iter = 0;
  for (; iter < options.max_iter && !converged_at(x); ++iter) {
    // d/du of B^T f(e^u): sum_k f_k(x) (B^T zeta_k) y_k^T.
    Matrix jac = Matrix::Zero(m, m);
    for (int k = 0; k < net.num_reactions(); ++k) {
      const double flux = deterministic_rate(net, k, x);
      jac.topRows(s) += flux * (basis.transpose() * net.reaction_vector(k).cast<double>()) *
                        net.reaction(k).source.cast<double>().transpose();
    }
    jac.bottomRows(m - s) = laws * x.asDiagonal();

    Eigen::ColPivHouseholderQR<Matrix> qr(jac);
    if (qr.rank() < m) {
      throw NumericalError("singular Jacobian in equilibrium solve; try a different x0");
    }
    const Vector newton = qr.solve(-g);
    // Steepest descent on the merit as a fallback when Newton stalls far from
    // the solution.
    const Vector gradient = -(jac.transpose() * g);

    auto line_search = [&](Vector step) {
      const double longest = step.lpNorm<Eigen::Infinity>();
      if (longest > 5.0) step *= 5.0 / longest;
      const double slope = g.dot(jac * step);
      // Armijo backtracking on 0.5 ||G||^2.
      for (double t = 1.0; t > 1e-12; t *= 0.5) {
        const Vector u_try = u + t * step;
        const Vector x_try = u_try.array().exp();
        const Vector g_try = system(x_try);
        const double merit_try = 0.5 * g_try.squaredNorm();
        if (std::isfinite(merit_try) && merit_try <= merit + 1e-4 * t * slope) {
          u = u_try;
          x = x_try;
          g = g_try;
          merit = merit_try;
          return true;
        }
      }
      return false;
    };
    const bool accepted = line_search(newton) || line_search(gradient);
    if (!accepted) break;
  }

  result.c = x;
  result.iterations = iter;
  result.residual_ode = ode_rhs(net, x).lpNorm<Eigen::Infinity>();
  result.converged = converged_at(x);
  const BalanceReport balance = is_complex_balanced(net, x, options.balance_tol);
  result.residual_cb = balance.max_rel_gap;
  result.complex_balanced = balance.balanced;
  return result;
}

Vector generalized_equilibrium(const Vector& c, const Vector& d, const Vector& A) {
  if (c.size() != d.size() || c.size() != A.size()) {
    throw DomainError("c, d and A must have equal length");
  }
  if ((c.array() <= 0.0).any() || (d.array() <= 0.0).any() || (A.array() <= 0.0).any()) {
    throw DomainError("c, d and A must be positive");
  }
  return (c.array() / A.array()).pow(d.array().inverse());
}

}  // namespace crn
