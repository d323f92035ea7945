#pragma once

#include "crn/kinetics.hpp"
#include "crn/network.hpp"
#include "crn/types.hpp"

#include <Eigen/SparseCore>

#include <map>
#include <optional>
#include <vector>

namespace crn {

struct Normalization {
  double log_M = 0.0;
  double M = 0.0;  // exp(log_M); +inf when it overflows
  // Per-species truncation radius N_i; the partial sum runs over x <= N.
  std::vector<long> truncation;
  // Certified bound on M_true - M (absolute, possibly +inf on overflow) and
  // the same bound relative to M.
  double tail_bound = 0.0;
  double rel_tail_bound = 0.0;
  std::vector<double> species_log_sums;
};

/// Product-form measure pi(x) = prod_i c_i^{x_i} / (theta_i(1)...theta_i(x_i)).
///
/// Stored as log c and the thetas; every evaluation happens in log space.
/// For mass action this is the Poisson product up to normalization.
class StationaryMeasure {
 public:
  StationaryMeasure(std::vector<ThetaSpec> thetas, Vector log_c);

  int num_species() const { return static_cast<int>(thetas_.size()); }
  const std::vector<ThetaSpec>& thetas() const { return thetas_; }
  const Vector& log_c() const { return log_c_; }
  Vector c() const { return log_c_.array().exp(); }

  // w(x) = sum_i [x_i ln c_i - ln(theta_i(1)...theta_i(x_i))]; -inf off the
  // nonnegative lattice.
  double log_weight(const State& x) const;

  /// w(to) - w(from) by direct summation over the differing range of each
  /// coordinate. Exact to a few ulps for nearby states, where log_weight
  /// differences would lose digits to cancellation.
  double log_weight_ratio(const State& from, const State& to) const;

  bool normalized() const { return normalization_.has_value(); }
  const std::optional<Normalization>& normalization() const { return normalization_; }

  // ln pi(x) - ln M. Requires normalized().
  double log_probability(const State& x) const;
  double probability(const State& x) const;

  StationaryMeasure with_normalization(Normalization n) const;

 private:
  std::vector<ThetaSpec> thetas_;
  Vector log_c_;
  std::optional<Normalization> normalization_;
};

/// Unnormalized product-form measure for kinetics `kin` at c > 0. Rejects
/// theta with an interior zero.
StationaryMeasure product_measure(const ReactionNetwork& net, const KineticsSpec& kin,
                                  const Vector& c);

/// Per-species sums with certified geometric tails; the total remainder bound
/// is at most rel_tol * M. Throws DomainError when some tail exponent is
/// not positive.
StationaryMeasure normalize(const StationaryMeasure& measure, double rel_tol = 1e-12);

/// Forward-equation residual at x:
///   r(x) = sum_k pi(x - zeta_k) lambda_k(x - zeta_k) - pi(x) sum_k lambda_k(x)
/// relative to the outflow pi(x) sum_k lambda_k(x) when that is positive,
/// otherwise absolute in units of the unnormalized measure.
double master_equation_residual(const ReactionNetwork& net, const KineticsSpec& kin,
                                const StationaryMeasure& measure, const State& x);

struct ResidualScan {
  double max_residual = 0.0;
  State argmax;
  long points = 0;
};

// Max |residual| over the box {0..box_i} (all states of the product box).
ResidualScan max_residual_in_box(const ReactionNetwork& net, const KineticsSpec& kin,
                                 const StationaryMeasure& measure,
                                 const std::vector<int>& box);

struct NonexplosivityReport {
  bool finite = false;
  double estimate = 0.0;  // sum_x pi(x) sum_k lambda_k(x), pi normalized
  double bound = 0.0;     // certified |estimate - true value|
  std::vector<long> truncation;
  std::string reason;  // why finite = false
};

/// Expected total jump rate under the normalized measure.
///
/// Each reaction factorizes over species; the species sums of
/// t_x theta(x)...theta(x-y+1) are truncated where the tail, dominated via
/// the shift x -> x - y onto the normalizer's geometric tail, is below
/// rel_tol of the partial sum.
NonexplosivityReport nonexplosivity_sum(const ReactionNetwork& net,
                                        const KineticsSpec& kin,
                                        const StationaryMeasure& measure,
                                        double rel_tol = 1e-12);

/// Finite-box CTMC for oracle solves. Transitions that would leave the box
/// are dropped (reflecting truncation).
class TruncatedChain {
 public:
  using Generator = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  int num_states() const { return static_cast<int>(states_.size()); }
  const std::vector<State>& states() const { return states_; }
  const State& state(int i) const { return states_[i]; }
  std::optional<int> index_of(const State& x) const;
  const std::vector<int>& box() const { return box_; }

  // Q(i, j) is the rate i -> j; diagonal makes rows sum to zero.
  const Generator& generator() const { return generator_; }

  friend TruncatedChain build_truncated_chain(const ReactionNetwork&, const KineticsSpec&,
                                              const std::vector<int>&,
                                              const std::optional<State>&);

 private:
  std::vector<int> box_;
  std::vector<State> states_;
  std::map<State, int, StateLess> index_;
  Generator generator_;
};

/// Enumerates {0..box_1} x ... x {0..box_m}; when class_anchor is set, keeps
/// only states with the anchor's conserved totals.
TruncatedChain build_truncated_chain(const ReactionNetwork& net, const KineticsSpec& kin,
                                     const std::vector<int>& box,
                                     const std::optional<State>& class_anchor = std::nullopt);

/// Stationary vector of the truncated chain: p Q = 0, sum p = 1 by sparse LU.
/// Throws DomainError listing states outside the anchor's strong component
/// when the chain is reducible.
Vector oracle_stationary(const TruncatedChain& chain);

// 0.5 sum |p - q| against the closed-form measure restricted to the chain's
// states and renormalized there.
double tv_to_truncated_measure(const TruncatedChain& chain, const Vector& p,
                               const StationaryMeasure& measure);

/// 0.5 sum_x |p(x) - pi(x)| over the whole lattice, for an empirical p with
/// finite support and a normalized measure.
double tv_to_measure(const std::map<State, double, StateLess>& p,
                     const StationaryMeasure& measure);

struct ConverseReport {
  bool stationary = false;
  bool complex_balanced = false;
  double max_residual = 0.0;
  State argmax;
  double max_balance_gap = 0.0;
  bool agree() const { return stationary == complex_balanced; }
};

/// Checks "pi is stationary" (residual over the box <= tol) against
/// "c is complex balanced" (relative gap <= balance_tol). The two must agree
/// whenever theta_i -> 0 or infinity; callers treat disagreement as a bug.
ConverseReport converse_check(const ReactionNetwork& net, const KineticsSpec& kin,
                              const Vector& c, const std::vector<int>& box,
                              double tol = 1e-10, double balance_tol = 1e-9);

}  // namespace crn
