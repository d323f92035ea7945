#pragma once

#include "crn/network.hpp"
#include "crn/types.hpp"

#include <map>
#include <vector>

namespace crn {

/// Per-species association function theta(x).
///
/// theta(x) = 0 for x <= 0, an explicit value for x in `overrides`, and
/// tail_A * x^tail_d otherwise. With tail_A = tail_d = 1 and no overrides
/// this is stochastic mass action, theta(x) = x.
struct ThetaSpec {
  double tail_A = 1.0;
  double tail_d = 1.0;
  std::map<long, double> overrides;

  static ThetaSpec mass_action() { return {}; }
  static ThetaSpec power(double A, double d) { return {A, d, {}}; }

  bool is_mass_action() const {
    return tail_A == 1.0 && tail_d == 1.0 && overrides.empty();
  }

  double operator()(long x) const;

  // ln theta(x); -inf where theta vanishes.
  double log_value(long x) const;

  // sum_{j=1..x} ln theta(j), i.e. ln(theta(1)...theta(x)). Zero for x <= 0.
  double log_factorial(long x) const;

  // sum_{j=lo+1..hi} ln theta(j) by direct summation; use for short ranges.
  double log_factorial_span(long lo, long hi) const;

  // Largest overridden argument, or 0.
  long last_override() const { return overrides.empty() ? 0 : overrides.rbegin()->first; }

  // True when some theta(j), j >= 1, is zero (the product-form weight is then
  // undefined beyond j).
  bool has_interior_zero() const;

  friend bool operator==(const ThetaSpec&, const ThetaSpec&) = default;
};

/// Kinetics of the stochastic model: one ThetaSpec per species. Mass action
/// is the special case where every species uses theta(x) = x.
struct KineticsSpec {
  enum class Mode { mass_action, general };

  std::vector<ThetaSpec> thetas;

  static KineticsSpec mass_action(int num_species) {
    return {std::vector<ThetaSpec>(num_species)};
  }

  Mode mode() const;
  bool is_mass_action() const { return mode() == Mode::mass_action; }
  int num_species() const { return static_cast<int>(thetas.size()); }

  // Tail exponents / prefactors as vectors (the natural modified-scaling d, A).
  Vector tail_exponents() const;
  Vector tail_prefactors() const;

  friend bool operator==(const KineticsSpec&, const KineticsSpec&) = default;
};

/// Volume scaling of the rate constants: kappa_k^V = kappa_k / V^(d.y_k - 1).
///
/// The classical scaling is d = (1,...,1); A is carried along because the
/// limiting potential depends on it.
struct ScalingConfig {
  enum class Mode { classical, modified };

  double volume = 1.0;
  Vector d;
  Vector A;
  Mode mode = Mode::classical;

  static ScalingConfig classical(double volume, int num_species);
  static ScalingConfig modified(double volume, Vector d, Vector A);

  ScalingConfig with_volume(double v) const {
    ScalingConfig copy = *this;
    copy.volume = v;
    return copy;
  }

  // Throws DomainError on V <= 0, non-positive d or A, wrong sizes, or a
  // classical config with d != 1.
  void validate(int num_species) const;
};

// theta(x) theta(x-1) ... theta(x-y+1); 1 for y = 0.
double falling_theta_product(const ThetaSpec& theta, long x, int y);

/// lambda_k(x) = kappa_k prod_i theta_i(x_i) ... theta_i(x_i - y_ki + 1).
double intensity(const ReactionNetwork& net, const KineticsSpec& kin, int k,
                 const State& x);

// Sum over all reactions of intensity(); the total jump rate out of x.
double total_intensity(const ReactionNetwork& net, const KineticsSpec& kin,
                       const State& x);

/// lambda_k^V(x) = kappa_k / V^(d.y_k - 1) * (theta product of intensity()).
double scaled_intensity(const ReactionNetwork& net, const KineticsSpec& kin,
                        const ScalingConfig& cfg, int k, const State& x);

/// Deterministic mass-action rate kappa_k x^{y_k}, with 0^0 = 1.
template <typename Derived>
typename Derived::Scalar deterministic_rate(const ReactionNetwork& net, int k,
                                            const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Reaction& r = net.reaction(k);
  Scalar value = Scalar(r.rate);
  for (int i = 0; i < r.source.size(); ++i) {
    for (int j = 0; j < r.source[i]; ++j) value *= x[i];
  }
  return value;
}

/// kappa_k prod_i (A_i x_i^d_i)^{y_ki}. Throws DomainError when some x_i <= 0
/// would need a non-integer power.
double generalized_ode_rate(const ReactionNetwork& net, int k, const Vector& x,
                            const Vector& d, const Vector& A);

}  // namespace crn
