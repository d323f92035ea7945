#include "crn/stationary.hpp"

#include "crn/equilibrium.hpp"
#include "crn/errors.hpp"
#include "crn/graph.hpp"
#include "crn/series.hpp"
#include "crn/structure.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <sstream>

namespace crn {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Calls f(x) for every x in {0..box_1} x ... x {0..box_m}, first coordinate
// fastest.
template <typename F>
void for_each_in_box(const std::vector<int>& box, F&& f) {
  const int m = static_cast<int>(box.size());
  State x = State::Zero(m);
  while (true) {
    f(static_cast<const State&>(x));
    int i = 0;
    while (i < m && x[i] == box[i]) x[i++] = 0;
    if (i == m) return;
    ++x[i];
  }
}

void check_box(const std::vector<int>& box, int m) {
  if (static_cast<int>(box.size()) != m) throw DomainError("box needs one cap per species");
  for (int b : box) {
    if (b < 0) throw DomainError("box caps must be nonnegative");
  }
}

std::string state_text(const State& x) {
  std::ostringstream out;
  out << "(";
  for (int i = 0; i < x.size(); ++i) out << (i ? "," : "") << x[i];
  out << ")";
  return out.str();
}

}  // namespace

StationaryMeasure::StationaryMeasure(std::vector<ThetaSpec> thetas, Vector log_c)
    : thetas_(std::move(thetas)), log_c_(std::move(log_c)) {
  if (static_cast<int>(thetas_.size()) != log_c_.size()) {
    throw DomainError("measure needs one theta per species");
  }
}

double StationaryMeasure::log_weight(const State& x) const {
  if (!nonnegative(x)) return kNegInf;
  double w = 0.0;
  for (int i = 0; i < num_species(); ++i) {
    w += x[i] * log_c_[i] - thetas_[i].log_factorial(x[i]);
  }
  return w;
}

double StationaryMeasure::log_weight_ratio(const State& from, const State& to) const {
  if (!nonnegative(to)) return kNegInf;
  double w = 0.0;
  for (int i = 0; i < num_species(); ++i) {
    const long a = from[i];
    const long b = to[i];
    if (a == b) continue;
    w += (b - a) * log_c_[i];
    w += b > a ? -thetas_[i].log_factorial_span(a, b) : thetas_[i].log_factorial_span(b, a);
  }
  return w;
}

double StationaryMeasure::log_probability(const State& x) const {
  if (!normalization_) throw DomainError("measure is not normalized");
  return log_weight(x) - normalization_->log_M;
}

double StationaryMeasure::probability(const State& x) const {
  return std::exp(log_probability(x));
}

StationaryMeasure StationaryMeasure::with_normalization(Normalization n) const {
  StationaryMeasure copy = *this;
  copy.normalization_ = std::move(n);
  return copy;
}

StationaryMeasure product_measure(const ReactionNetwork& net, const KineticsSpec& kin,
                                  const Vector& c) {
  if (kin.num_species() != net.num_species()) {
    throw DomainError("kinetics and network disagree on species count");
  }
  if (c.size() != net.num_species()) throw DomainError("c has wrong length");
  if ((c.array() <= 0.0).any()) throw DomainError("c must be strictly positive");
  for (int i = 0; i < kin.num_species(); ++i) {
    if (kin.thetas[i].has_interior_zero()) {
      throw DomainError("theta of species '" + net.species()[i] +
                        "' vanishes at a positive count; product-form weight undefined");
    }
  }
  return StationaryMeasure(kin.thetas, c.array().log());
}

StationaryMeasure normalize(const StationaryMeasure& measure, double rel_tol) {
  const int m = measure.num_species();
  // (1 + per_species)^m = 1 + rel_tol
  const double per_species = std::expm1(std::log1p(rel_tol) / m);
  Normalization n;
  double log_rel_growth = 0.0;
  for (int i = 0; i < m; ++i) {
    const ThetaSeries series(measure.thetas()[i], measure.log_c()[i]);
    const SeriesSum sum = sum_with_tail_bound(series, per_species);
    n.species_log_sums.push_back(sum.log_sum);
    n.truncation.push_back(sum.truncation);
    n.log_M += sum.log_sum;
    log_rel_growth += std::log1p(std::exp(sum.log_tail_bound - sum.log_sum));
  }
  n.M = std::exp(n.log_M);
  n.rel_tail_bound = std::expm1(log_rel_growth);
  n.tail_bound = n.rel_tail_bound * n.M;
  return measure.with_normalization(std::move(n));
}

double master_equation_residual(const ReactionNetwork& net, const KineticsSpec& kin,
                                const StationaryMeasure& measure, const State& x) {
  const double outflow = total_intensity(net, kin, x);
  // Inflow in units of pi(x).
  double inflow = 0.0;
  for (int k = 0; k < net.num_reactions(); ++k) {
    const State from = x - net.reaction_vector(k);
    if (!nonnegative(from)) continue;
    const double rate = intensity(net, kin, k, from);
    if (rate == 0.0) continue;
    inflow += std::exp(measure.log_weight_ratio(x, from)) * rate;
  }
  if (outflow > 0.0) return (inflow - outflow) / outflow;
  return std::exp(measure.log_weight(x)) * inflow;
}

ResidualScan max_residual_in_box(const ReactionNetwork& net, const KineticsSpec& kin,
                                 const StationaryMeasure& measure,
                                 const std::vector<int>& box) {
  check_box(box, net.num_species());
  ResidualScan scan;
  scan.argmax = State::Zero(net.num_species());
  for_each_in_box(box, [&](const State& x) {
    const double r = std::abs(master_equation_residual(net, kin, measure, x));
    ++scan.points;
    if (r > scan.max_residual || std::isnan(r)) {
      scan.max_residual = r;
      scan.argmax = x;
    }
  });
  return scan;
}

NonexplosivityReport nonexplosivity_sum(const ReactionNetwork& net,
                                        const KineticsSpec& kin,
                                        const StationaryMeasure& measure,
                                        double rel_tol) {
  NonexplosivityReport report;
  const int m = net.num_species();
  if (kin.thetas != measure.thetas()) {
    throw DomainError("measure was built for different kinetics");
  }
  for (int i = 0; i < m; ++i) {
    if (measure.thetas()[i].tail_d <= 0.0 || kin.thetas[i].tail_d <= 0.0) {
      report.reason = "theta of species '" + net.species()[i] +
                      "' does not grow (tail exponent <= 0); summability criterion "
                      "inapplicable";
      return report;
    }
  }
  // Order of the falling theta product needed per species: y in 0..s_i.
  std::vector<int> max_order(m, 0);
  for (int k = 0; k < net.num_reactions(); ++k) {
    for (int i = 0; i < m; ++i) {
      max_order[i] = std::max(max_order[i], net.reaction(k).source[i]);
    }
  }

  // log_partial[i][y] = log sum_{x <= N_i} t_x theta(x)...theta(x-y+1)
  // log_tail[i][y]    = log of the certified bound on the rest
  std::vector<std::vector<double>> log_partial(m), log_tail(m);
  const double per_factor = rel_tol / (4.0 * m + 4.0);
  for (int i = 0; i < m; ++i) {
    const ThetaSpec& theta = kin.thetas[i];
    const ThetaSeries series(measure.thetas()[i], measure.log_c()[i]);
    const int orders = max_order[i] + 1;
    std::vector<LogSumExp> sums(orders);
    std::vector<double> falling(orders, 0.0);
    log_partial[i].assign(orders, kNegInf);
    log_tail[i].assign(orders, kNegInf);
    for (long x = 0;; ++x) {
      const double base = series.log_term(x);
      double log_fall = 0.0;
      bool all_done = x >= max_order[i];
      for (int y = 0; y < orders; ++y) {
        if (y > 0) log_fall += x - y + 1 > 0 ? theta.log_value(x - y + 1) : kNegInf;
        if (x >= y) sums[y].add(base + log_fall);
        log_partial[i][y] = sums[y].value();
        // For x' > N: t_x' theta(x')...theta(x'-y+1) = c^y t_{x'-y}.
        log_tail[i][y] = x >= y ? y * measure.log_c()[i] + series.log_tail_bound(x - y)
                                : std::numeric_limits<double>::infinity();
        if (log_tail[i][y] - log_partial[i][y] > std::log(per_factor)) all_done = false;
      }
      if (all_done) {
        report.truncation.push_back(x);
        break;
      }
      if (x > 200'000'000) throw NumericalError("non-explosivity sum did not converge");
    }
  }

  // S = sum_k kappa_k prod_i E_i[theta falling product of order y_ki].
  double estimate = 0.0, upper = 0.0, lower = 0.0;
  for (int k = 0; k < net.num_reactions(); ++k) {
    double log_est = std::log(net.reaction(k).rate);
    double log_up = log_est, log_low = log_est;
    for (int i = 0; i < m; ++i) {
      const int y = net.reaction(k).source[i];
      const double log_z = log_partial[i][0];
      log_est += log_partial[i][y] - log_z;
      log_up += log_add(log_partial[i][y], log_tail[i][y]) - log_z;
      log_low += log_partial[i][y] - log_add(log_z, log_tail[i][0]);
    }
    estimate += std::exp(log_est);
    upper += std::exp(log_up);
    lower += std::exp(log_low);
  }
  report.finite = std::isfinite(estimate) && std::isfinite(upper);
  report.estimate = estimate;
  report.bound = std::max(upper - estimate, estimate - lower);
  return report;
}

std::optional<int> TruncatedChain::index_of(const State& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TruncatedChain build_truncated_chain(const ReactionNetwork& net, const KineticsSpec& kin,
                                     const std::vector<int>& box,
                                     const std::optional<State>& class_anchor) {
  check_box(box, net.num_species());
  TruncatedChain chain;
  chain.box_ = box;
  const Matrix laws = conservation_laws(net);
  Vector totals;
  if (class_anchor) totals = laws * class_anchor->cast<double>();

  for_each_in_box(box, [&](const State& x) {
    if (class_anchor && laws.rows() > 0 &&
        ((laws * x.cast<double>() - totals).array().abs() > 0.5).any()) {
      return;
    }
    chain.index_.emplace(x, chain.num_states());
    chain.states_.push_back(x);
  });

  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < chain.num_states(); ++i) {
    const State& x = chain.states_[i];
    double out = 0.0;
    for (int k = 0; k < net.num_reactions(); ++k) {
      const double rate = intensity(net, kin, k, x);
      if (rate == 0.0) continue;
      auto j = chain.index_of(x + net.reaction_vector(k));
      if (!j) continue;
      entries.emplace_back(i, *j, rate);
      out += rate;
    }
    entries.emplace_back(i, i, -out);
  }
  chain.generator_.resize(chain.num_states(), chain.num_states());
  chain.generator_.setFromTriplets(entries.begin(), entries.end());
  return chain;
}

Vector oracle_stationary(const TruncatedChain& chain) {
  const int n = chain.num_states();
  if (n == 0) throw DomainError("truncated chain has no states");
  const auto& q = chain.generator();

  Adjacency edges(n);
  for (int i = 0; i < n; ++i) {
    for (TruncatedChain::Generator::InnerIterator it(q, i); it; ++it) {
      if (it.col() != i && it.value() > 0.0) edges[i].push_back(static_cast<int>(it.col()));
    }
  }
  const std::vector<int> scc = strongly_connected_components(edges);
  std::vector<int> stray;
  for (int i = 0; i < n; ++i) {
    if (scc[i] != scc[0]) stray.push_back(i);
  }
  if (!stray.empty()) {
    std::string msg = "truncated chain is reducible; states not communicating with " +
                      state_text(chain.state(0)) + ":";
    for (std::size_t j = 0; j < stray.size() && j < 20; ++j) {
      msg += " " + state_text(chain.state(stray[j]));
    }
    if (stray.size() > 20) msg += " ... (" + std::to_string(stray.size()) + " total)";
    throw DomainError(msg);
  }

  // Q^T p = 0 with the last equation replaced by sum p = 1.
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < n; ++i) {
    for (TruncatedChain::Generator::InnerIterator it(q, i); it; ++it) {
      if (it.col() != n - 1) entries.emplace_back(static_cast<int>(it.col()), i, it.value());
    }
  }
  for (int j = 0; j < n; ++j) entries.emplace_back(n - 1, j, 1.0);
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NumericalError("sparse LU failed on generator");
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  Vector p = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw NumericalError("sparse LU solve failed");
  return p;
}

double tv_to_truncated_measure(const TruncatedChain& chain, const Vector& p,
                               const StationaryMeasure& measure) {
  Vector logw(chain.num_states());
  LogSumExp total;
  for (int i = 0; i < chain.num_states(); ++i) {
    logw[i] = measure.log_weight(chain.state(i));
    total.add(logw[i]);
  }
  double tv = 0.0;
  for (int i = 0; i < chain.num_states(); ++i) {
    tv += std::abs(p[i] - std::exp(logw[i] - total.value()));
  }
  return 0.5 * tv;
}

double tv_to_measure(const std::map<State, double, StateLess>& p,
                     const StationaryMeasure& measure) {
  double diff = 0.0, covered = 0.0;
  for (const auto& [x, px] : p) {
    const double pi = measure.probability(x);
    diff += std::abs(px - pi);
    covered += pi;
  }
  return 0.5 * (diff + std::max(0.0, 1.0 - covered));
}

ConverseReport converse_check(const ReactionNetwork& net, const KineticsSpec& kin,
                              const Vector& c, const std::vector<int>& box, double tol,
                              double balance_tol) {
  const StationaryMeasure measure = product_measure(net, kin, c);
  const ResidualScan scan = max_residual_in_box(net, kin, measure, box);
  const BalanceReport balance = is_complex_balanced(net, c, balance_tol);
  ConverseReport report;
  report.max_residual = scan.max_residual;
  report.argmax = scan.argmax;
  report.stationary = scan.max_residual <= tol;
  report.complex_balanced = balance.balanced;
  report.max_balance_gap = balance.max_rel_gap;
  return report;
}

}  // namespace crn
