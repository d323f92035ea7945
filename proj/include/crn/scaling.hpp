#pragma once

#include "crn/kinetics.hpp"
#include "crn/network.hpp"
#include "crn/stationary.hpp"
#include "crn/types.hpp"

#include <vector>

namespace crn {

/// Parameters of the limiting potential
///   V(x) = sum_i x_i (d_i ln x_i - ln c_i - d_i + ln A_i) + sum_i d_i (c_i/A_i)^{1/d_i}
/// whose minimum, 0, sits at c~ = (c/A)^{1/d}. With d = A = 1 this is the
/// classical sum_i x_i (ln x_i - ln c_i - 1) + c_i.
struct LyapunovSpec {
  Vector c;
  Vector d;
  Vector A;

  static LyapunovSpec classical(const Vector& c) {
    return {c, Vector::Ones(c.size()), Vector::Ones(c.size())};
  }
};

template <typename Derived>
typename Derived::Scalar lyapunov(const LyapunovSpec& spec,
                                  const Eigen::MatrixBase<Derived>& x) {
  using std::log;
  using std::pow;
  using Scalar = typename Derived::Scalar;
  Scalar value(0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    value += x[i] * (spec.d[i] * log(x[i]) - log(spec.c[i]) - spec.d[i] + log(spec.A[i]));
    value += spec.d[i] * pow(spec.c[i] / spec.A[i], 1.0 / spec.d[i]);
  }
  return value;
}

// Gradient: d_i ln x_i - ln c_i + ln A_i.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> lyapunov_gradient(
    const LyapunovSpec& spec, const Eigen::MatrixBase<Derived>& x) {
  return (spec.d.array() * x.array().log() - spec.c.array().log() + spec.A.array().log())
      .matrix();
}

/// pi*^V(x) = prod_i (V^{d_i} c_i)^{x_i} / (theta_i(1)...theta_i(x_i)), the
/// stationary measure of the chain with intensities scaled_intensity(cfg).
/// Unnormalized; pass it to normalize().
StationaryMeasure scaled_stationary_measure(const ReactionNetwork& net,
                                            const KineticsSpec& kin,
                                            const ScalingConfig& cfg, const Vector& c);

// round(V x~) componentwise, halves rounded up.
State lattice_point(const Vector& x_tilde, double volume);

/// -(1/V) ln pi~^V(x~) with pi~^V(x~) = pi^V(V x~). V x~ must be a
/// nonnegative integer vector (within 1e-9).
double nonequilibrium_potential(const ReactionNetwork& net, const KineticsSpec& kin,
                                const ScalingConfig& cfg, const Vector& c,
                                const Vector& x_tilde, double rel_tol = 1e-12);

struct PotentialRow {
  double volume = 0.0;
  Vector x_lattice;  // x~^V in (1/V) Z^m
  double potential = 0.0;
  double limit = 0.0;  // V(x~_target)
  double error = 0.0;
};

struct PotentialScan {
  Vector target;
  std::vector<double> volumes;
  std::vector<PotentialRow> rows;
  bool eventually_decreasing = false;
};

// Last ceil(n/2) entries strictly decreasing.
bool eventually_decreasing(const std::vector<double>& values);

/// Potential at x~^V = round(V x~)/V for each V against the limit V(x~)
/// built from (c, cfg.d, cfg.A). Rows are computed independently, on up to
/// `threads` threads (0: one per hardware thread).
PotentialScan potential_scan(const ReactionNetwork& net, const KineticsSpec& kin,
                             const ScalingConfig& cfg_template, const Vector& c,
                             const Vector& x_tilde, const std::vector<double>& volumes,
                             double rel_tol = 1e-12, unsigned threads = 1);

struct DescentReport {
  double max_value = 0.0;  // max over the grid of grad V . f
  Vector argmax;
  long points = 0;
};

/// grad V(x) . f(x), f the generalized right-hand side with (spec.d, spec.A),
/// maximized over the grid. Nonpositive everywhere when spec.c is a complex
/// balanced equilibrium of the mass-action system.
DescentReport lyapunov_descent_check(const ReactionNetwork& net, const LyapunovSpec& spec,
                                     const std::vector<Vector>& grid);

// Tensor grid with `counts[i]` evenly spaced points on [lo, hi] per axis.
std::vector<Vector> box_grid(double lo, double hi, const std::vector<int>& counts);

struct AsymptoticFit {
  std::vector<double> C;
  std::vector<double> g;  // ln sum_x C^x / (x!)^d
  double a = 0.0;
  double b = 0.0;
  double max_fit_residual = 0.0;
  // |g(C_max) - d C_max^{1/d}| / g(C_max)
  double leading_rel_error = 0.0;
  // |g(C_max) - (d C_max^{1/d} + a ln C_max + b)| / g(C_max)
  double corrected_rel_error = 0.0;
};

/// Least-squares fit of g(C) - d C^{1/d} ~ a ln C + b with g from certified
/// log-space summation. The grid must be increasing and span >= 3 decades.
AsymptoticFit asymptotic_normalizer_check(const std::vector<double>& C_grid, double d);

struct NormalizerGap {
  std::vector<double> volumes;
  std::vector<double> gaps;  // (1/V) |ln M_theta(V) - ln M_power(V)|
  double max_gap = 0.0;
  bool eventually_decreasing = false;
};

/// Compares the normalizer of the theta kinetics with that of the pure power
/// law A x^d, both at effective constants V^{d_i} c_i.
NormalizerGap theta_vs_power_normalizer_check(const KineticsSpec& kin, const Vector& d,
                                              const Vector& A, const Vector& c,
                                              const std::vector<double>& volumes,
                                              double rel_tol = 1e-12);

}  // namespace crn
