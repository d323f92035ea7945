// Acceptance suite: one PASS/FAIL line per criterion, with its runtime
// budget enforced. Exit status is nonzero if any criterion fails.

#include "crn/dsl.hpp"
#include "crn/equilibrium.hpp"
#include "crn/scaling.hpp"
#include "crn/series.hpp"
#include "crn/simulate.hpp"
#include "crn/stationary.hpp"
#include "crn/structure.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace crn {
namespace {

ParsedNetwork corpus(const std::string& name) {
  return load_network(std::string(CRN_CORPUS_DIR) + "/" + name);
}

Vector scalar(double v) { return Vector::Constant(1, v); }

// Collects failed checks with their measured values.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool passed() const { return failures_.empty(); }
  std::string summary() const {
    std::ostringstream out;
    const auto& items = passed() ? notes_ : failures_;
    for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "; " : "") << items[i];
    return out.str();
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Criterion 1
void structure_suite(Check& check) {
  struct Case {
    const char* file;
    int deficiency;
    bool weakly_reversible;
  };
  for (const Case& c : {Case{"birthdeath.crn", 0, true}, Case{"deficiency_one.crn", 1, false},
                        Case{"cycle3.crn", 0, true}, Case{"isomer.crn", 0, true},
                        Case{"two_classes.crn", 0, true}, Case{"binding.crn", 0, true}}) {
    const StructureReport r = deficiency(corpus(c.file).network);
    check.expect(r.deficiency == c.deficiency,
                 std::string(c.file) + " deficiency " + std::to_string(r.deficiency));
    check.expect(r.weakly_reversible == c.weakly_reversible,
                 std::string(c.file) + " weak reversibility");
  }
  check.note("6 corpus networks match");
}

// Criterion 2
void product_form_stationarity(Check& check) {
  for (const char* file : {"birthdeath.crn", "bd_theta2.crn"}) {
    const auto p = corpus(file);
    const auto scan =
        max_residual_in_box(p.network, p.kinetics, product_measure(p.network, p.kinetics,
                                                                   scalar(1.0)),
                            {30});
    check.expect(scan.max_residual <= 1e-10,
                 std::string(file) + " residual " + fmt(scan.max_residual));
    check.note(std::string(file) + " max " + fmt(scan.max_residual));
  }
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> log_rate(std::log(0.1), std::log(10.0));
  std::uniform_int_distribution<int> coord(0, 30);
  double worst = 0.0;
  int networks = 0;
  for (const char* file : {"birthdeath.crn", "bd_theta2.crn", "isomer.crn", "cycle3.crn",
                           "two_classes.crn", "binding.crn"}) {
    const auto p = corpus(file);
    const StructureReport s = deficiency(p.network);
    if (!s.weakly_reversible || s.deficiency != 0) continue;
    ++networks;
    for (int draw = 0; draw < 20; ++draw) {
      Vector kappa(p.network.num_reactions());
      for (auto& k : kappa) k = std::exp(log_rate(rng));
      const auto net = p.network.with_rates(kappa);
      const auto eq = find_positive_equilibrium(net);
      check.expect(eq.converged, std::string(file) + " Newton did not converge");
      const auto measure = product_measure(net, p.kinetics, eq.c);
      for (int point = 0; point < 200; ++point) {
        State x(net.num_species());
        for (auto& v : x) v = coord(rng);
        worst = std::max(worst,
                         std::abs(master_equation_residual(net, p.kinetics, measure, x)));
      }
    }
  }
  check.expect(worst <= 1e-10, "random-rate residual " + fmt(worst));
  check.note(std::to_string(networks) + " networks x 20 draws x 200 states max " + fmt(worst));
}

// Criterion 3
void oracle_agreement(Check& check) {
  for (const char* file : {"birthdeath.crn", "bd_theta2.crn"}) {
    const auto p = corpus(file);
    const auto chain = build_truncated_chain(p.network, p.kinetics, {50});
    const Vector pi = oracle_stationary(chain);
    const double tv = tv_to_truncated_measure(
        chain, pi, product_measure(p.network, p.kinetics, scalar(1.0)));
    check.expect(tv <= 1e-8, std::string(file) + " TV " + fmt(tv));
    check.note(std::string(file) + " TV " + fmt(tv));
  }
}

// Criterion 4
void normalizer_value(Check& check) {
  // Independent oracle: direct summation in long double.
  long double direct = 0.0L, term = 1.0L;
  for (int x = 0; x < 40; ++x) {
    direct += term;
    term /= static_cast<long double>(x + 1) * (x + 1);
  }
  const auto p = corpus("bd_theta2.crn");
  const auto m = normalize(product_measure(p.network, p.kinetics, scalar(1.0)));
  const double M = m.normalization()->M;
  check.expect(std::abs(M - 2.2795853) <= 1e-6, "M " + fmt(M));
  check.expect(std::abs(M - static_cast<double>(direct)) <= 1e-12, "M vs direct sum");
  check.note("M " + std::to_string(M));

  int cases = 0;
  for (const ThetaSpec& theta : {ThetaSpec::mass_action(), ThetaSpec::power(1.0, 2.0),
                                 ThetaSpec{1.0, 2.0, {{1, 0.5}}}, ThetaSpec::power(2.0, 0.5)}) {
    for (double c : {0.5, 1.0, 10.0, 100.0}) {
      for (double rel_tol : {1e-4, 1e-8, 1e-12}) {
        const StationaryMeasure sm({theta}, scalar(std::log(c)));
        const Normalization n = *normalize(sm, rel_tol).normalization();
        const long N = n.truncation[0];
        LogSumExp rest;
        for (long x = N + 1; x <= 10 * N + 10; ++x) {
          rest.add(x * std::log(c) - theta.log_factorial(x) - n.log_M);
        }
        const double remainder = std::exp(rest.value());
        check.expect(remainder <= n.rel_tail_bound * (1.0 + 1e-9),
                     "bound " + fmt(n.rel_tail_bound) + " < remainder " + fmt(remainder) +
                         " at c=" + fmt(c));
        ++cases;
      }
    }
  }
  check.note("bound dominates remainder in " + std::to_string(cases) + " cases");
}

// Criterion 5
void nonexplosivity(Check& check) {
  for (const char* file : {"birthdeath.crn", "bd_theta2.crn"}) {
    const auto p = corpus(file);
    const auto measure = normalize(product_measure(p.network, p.kinetics, scalar(1.0)));
    const auto r = nonexplosivity_sum(p.network, p.kinetics, measure);
    check.expect(r.finite && std::isfinite(r.bound), std::string(file) + " not finite");
    if (std::string(file) == "birthdeath.crn") {
      check.expect(std::abs(r.estimate - 2.0) <= 1e-9, "mass action estimate " + fmt(r.estimate));
    }
    check.note(std::string(file) + " S=" + std::to_string(r.estimate) + " +- " + fmt(r.bound));
  }
}

// Criterion 6
void converse_consistency(Check& check) {
  const auto p = corpus("bd_theta2.crn");
  for (double c : {0.5, 0.9, 1.0, 1.1, 2.0}) {
    const auto r = converse_check(p.network, p.kinetics, scalar(c), {25});
    const bool expected = c == 1.0;
    check.expect(r.agree(), "disagreement at c=" + fmt(c));
    check.expect(r.stationary == expected && r.complex_balanced == expected,
                 "wrong verdict at c=" + fmt(c));
  }
  const KineticsSpec inverse{{ThetaSpec::power(1.0, -1.0)}};
  const auto r = converse_check(p.network, inverse, scalar(1.0), {25});
  check.expect(r.max_residual <= 1e-12, "d=-1 residual " + fmt(r.max_residual));
  check.expect(r.complex_balanced, "d=-1 not complex balanced");
  check.note("5 c values agree; d=-1 residual " + fmt(r.max_residual));
}

// Criterion 7
void potential_convergence(Check& check) {
  const auto p = corpus("bd_theta2.crn");
  const std::vector<double> volumes{10, 100, 1000, 10000};
  const auto modified = potential_scan(
      p.network, p.kinetics, ScalingConfig::modified(1.0, scalar(2.0), scalar(1.0)), scalar(1.0),
      scalar(2.0), volumes);
  std::vector<double> errors;
  for (const auto& row : modified.rows) errors.push_back(row.error);
  check.expect(eventually_decreasing(errors), "modified errors not eventually decreasing");
  check.expect(errors.back() <= 0.01, "error at V=1e4 " + fmt(errors.back()));
  const auto classical = potential_scan(p.network, p.kinetics,
                                        ScalingConfig::classical(1.0, 1), scalar(1.0),
                                        scalar(2.0), volumes);
  const double u100 = classical.rows[1].potential, u10000 = classical.rows[3].potential;
  check.expect(u10000 > u100, "classical scan did not diverge");
  check.note("modified error " + fmt(errors.front()) + " -> " + fmt(errors.back()) +
             "; classical u " + fmt(u100) + " -> " + fmt(u10000));
}

// Criterion 8
void lyapunov_properties(Check& check) {
  const auto net = corpus("birthdeath.crn").network;
  const LyapunovSpec spec{scalar(1.0), scalar(2.0), scalar(1.0)};
  const auto descent = lyapunov_descent_check(net, spec, box_grid(0.01, 10.0, {10000}));
  check.expect(descent.points == 10000 && descent.max_value <= 1e-12,
               "descent max " + fmt(descent.max_value));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 10.0);
  double worst_fd = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const LyapunovSpec s{scalar(u(rng)), scalar(0.5 + u(rng) / 4.0), scalar(u(rng))};
    const Vector x = scalar(u(rng));
    const double h = 1e-6;
    const double fd = (lyapunov(s, scalar(x[0] + h)) - lyapunov(s, scalar(x[0] - h))) / (2 * h);
    const double g = lyapunov_gradient(s, x)[0];
    worst_fd = std::max(worst_fd, std::abs(fd - g) / std::max(1.0, std::abs(g)));
  }
  check.expect(worst_fd <= 1e-6, "finite-difference mismatch " + fmt(worst_fd));

  const auto traj =
      integrate_ode(net, OdeModel::generalized(scalar(2.0), scalar(1.0)), scalar(5.0), 10.0, 1e-3);
  const auto trace = lyapunov_along_trajectory(traj, spec);
  check.expect(trace.non_increasing, "V increased by " + fmt(trace.max_increase));
  check.expect(trace.values.back() <= 1e-6, "V(x(10)) " + fmt(trace.values.back()));
  check.note("descent max " + fmt(descent.max_value) + "; fd err " + fmt(worst_fd) +
             "; V(x(10)) " + fmt(trace.values.back()));
}

// Criterion 9
void asymptotics(Check& check) {
  std::vector<double> grid(20);
  for (int i = 0; i < 20; ++i) grid[i] = std::pow(10.0, 1.0 + 3.0 * i / 19.0);
  const auto square = asymptotic_normalizer_check(grid, 2.0);
  check.expect(square.corrected_rel_error <= 0.01,
               "corrected rel error " + fmt(square.corrected_rel_error));
  check.expect(square.max_fit_residual <= 0.05, "fit residual " + fmt(square.max_fit_residual));
  const auto linear = asymptotic_normalizer_check(grid, 1.0);
  double identity = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    identity = std::max(identity, std::abs(linear.g[i] - linear.C[i]));
  }
  check.expect(identity <= 1e-9, "d=1 identity " + fmt(identity));

  const KineticsSpec overridden{{ThetaSpec{1.0, 2.0, {{1, 0.5}}}}};
  const auto gap = theta_vs_power_normalizer_check(overridden, scalar(2.0), scalar(1.0),
                                                   scalar(1.0), {10, 100, 1000});
  bool decreasing = true;
  for (std::size_t i = 1; i < gap.gaps.size(); ++i) decreasing &= gap.gaps[i] < gap.gaps[i - 1];
  check.expect(decreasing, "normalizer gap not decreasing");
  check.note("corrected " + fmt(square.corrected_rel_error) + " (leading only " +
             fmt(square.leading_rel_error) + "); fit residual " + fmt(square.max_fit_residual) +
             "; gap " + fmt(gap.gaps.front()) + " -> " + fmt(gap.gaps.back()));
}

// Criterion 10
void simulation_ergodicity(Check& check) {
  for (const char* file : {"birthdeath.crn", "bd_theta2.crn"}) {
    const auto p = corpus(file);
    SimConfig cfg;
    cfg.t_final = 1e4;
    cfg.burn_in = 1e2;
    cfg.seed = 42;
    cfg.x0 = State::Zero(1);
    const auto a = ssa_path(p.network, p.kinetics, cfg);
    const auto b = ssa_path(p.network, p.kinetics, cfg);
    const auto pi = normalize(product_measure(p.network, p.kinetics, scalar(1.0)));
    const double tv = tv_to_measure(a.occupation.fraction, pi);
    check.expect(tv <= 0.02, std::string(file) + " TV " + fmt(tv));
    check.expect(a.events == b.events, std::string(file) + " runs differ");
    check.note(std::string(file) + " TV " + fmt(tv));
  }
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<void(Check&)> body;
};

}  // namespace
}  // namespace crn

int main() {
  using namespace crn;
  const std::vector<Criterion> criteria{
      {1, "structure suite", 1.0, structure_suite},
      {2, "product-form stationarity", 10.0, product_form_stationarity},
      {3, "oracle agreement", 5.0, oracle_agreement},
      {4, "normalizer value and tail bound", 10.0, normalizer_value},
      {5, "non-explosivity", 10.0, nonexplosivity},
      {6, "converse consistency", 5.0, converse_consistency},
      {7, "potential convergence", 60.0, potential_convergence},
      {8, "Lyapunov properties", 10.0, lyapunov_properties},
      {9, "normalizer asymptotics", 30.0, asymptotics},
      {10, "simulation ergodicity", 60.0, simulation_ergodicity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(seconds <= c.budget_seconds, "over budget " + fmt(c.budget_seconds) + " s");
    const bool ok = check.passed();
    failed += ok ? 0 : 1;
    std::printf("%s  %2d  %-32s %8.3f s  %s\n", ok ? "PASS" : "FAIL", c.id, c.name, seconds,
                check.summary().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
