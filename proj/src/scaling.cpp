#include "crn/scaling.hpp"

#include "crn/equilibrium.hpp"
#include "crn/errors.hpp"
#include "crn/parallel.hpp"
#include "crn/series.hpp"

#include <cmath>

namespace crn {

StationaryMeasure scaled_stationary_measure(const ReactionNetwork& net,
                                            const KineticsSpec& kin,
                                            const ScalingConfig& cfg, const Vector& c) {
  cfg.validate(net.num_species());
  const StationaryMeasure base = product_measure(net, kin, c);
  const Vector log_c = base.log_c().array() + cfg.d.array() * std::log(cfg.volume);
  return StationaryMeasure(kin.thetas, log_c);
}

State lattice_point(const Vector& x_tilde, double volume) {
  State x(x_tilde.size());
  for (int i = 0; i < x_tilde.size(); ++i) {
    x[i] = static_cast<int>(std::floor(volume * x_tilde[i] + 0.5));
  }
  return x;
}

double nonequilibrium_potential(const ReactionNetwork& net, const KineticsSpec& kin,
                                const ScalingConfig& cfg, const Vector& c,
                                const Vector& x_tilde, double rel_tol) {
  if (x_tilde.size() != net.num_species()) throw DomainError("x~ has wrong length");
  const Vector scaled = cfg.volume * x_tilde;
  const State x = lattice_point(x_tilde, cfg.volume);
  if ((scaled - x.cast<double>()).lpNorm<Eigen::Infinity>() > 1e-9 || !nonnegative(x)) {
    throw DomainError("V x~ must be a nonnegative integer vector");
  }
  const StationaryMeasure measure =
      normalize(scaled_stationary_measure(net, kin, cfg, c), rel_tol);
  return -measure.log_probability(x) / cfg.volume;
}

bool eventually_decreasing(const std::vector<double>& values) {
  const std::size_t n = values.size();
  const std::size_t tail = (n + 1) / 2;
  for (std::size_t i = n - tail + 1; i < n; ++i) {
    if (!(values[i] < values[i - 1])) return false;
  }
  return true;
}

PotentialScan potential_scan(const ReactionNetwork& net, const KineticsSpec& kin,
                             const ScalingConfig& cfg_template, const Vector& c,
                             const Vector& x_tilde, const std::vector<double>& volumes,
                             double rel_tol, unsigned threads) {
  if (volumes.empty()) throw DomainError("volume grid is empty");
  for (std::size_t j = 1; j < volumes.size(); ++j) {
    if (!(volumes[j] > volumes[j - 1])) throw DomainError("volume grid must be increasing");
  }
  if (x_tilde.size() != net.num_species() || (x_tilde.array() <= 0.0).any()) {
    throw DomainError("target x~ must be a positive vector with one entry per species");
  }
  const LyapunovSpec spec{c, cfg_template.d, cfg_template.A};
  const double limit = lyapunov(spec, x_tilde);

  PotentialScan scan;
  scan.target = x_tilde;
  scan.volumes = volumes;
  scan.rows.resize(volumes.size());
  parallel_for(volumes.size(), threads, [&](std::size_t j) {
    const ScalingConfig cfg = cfg_template.with_volume(volumes[j]);
    PotentialRow& row = scan.rows[j];
    row.volume = volumes[j];
    row.x_lattice = lattice_point(x_tilde, volumes[j]).cast<double>() / volumes[j];
    row.potential = nonequilibrium_potential(net, kin, cfg, c, row.x_lattice, rel_tol);
    row.limit = limit;
    row.error = std::abs(row.potential - limit);
  });
  std::vector<double> errors;
  for (const auto& row : scan.rows) errors.push_back(row.error);
  scan.eventually_decreasing = eventually_decreasing(errors);
  return scan;
}

DescentReport lyapunov_descent_check(const ReactionNetwork& net, const LyapunovSpec& spec,
                                     const std::vector<Vector>& grid) {
  DescentReport report;
  report.max_value = -std::numeric_limits<double>::infinity();
  for (const Vector& x : grid) {
    if ((x.array() <= 0.0).any()) throw DomainError("grid points must be positive");
    const double value =
        lyapunov_gradient(spec, x).dot(generalized_ode_rhs(net, x, spec.d, spec.A));
    ++report.points;
    if (value > report.max_value) {
      report.max_value = value;
      report.argmax = x;
    }
  }
  return report;
}

std::vector<Vector> box_grid(double lo, double hi, const std::vector<int>& counts) {
  const int m = static_cast<int>(counts.size());
  std::vector<Vector> axes;
  for (int n : counts) {
    if (n < 1) throw DomainError("grid needs at least one point per axis");
    axes.push_back(n == 1 ? Vector(Vector::Constant(1, lo)) : Vector(Vector::LinSpaced(n, lo, hi)));
  }
  std::vector<Vector> grid;
  std::vector<int> idx(m, 0);
  while (true) {
    Vector x(m);
    for (int i = 0; i < m; ++i) x[i] = axes[i][idx[i]];
    grid.push_back(x);
    int i = 0;
    while (i < m && idx[i] == counts[i] - 1) idx[i++] = 0;
    if (i == m) return grid;
    ++idx[i];
  }
}

AsymptoticFit asymptotic_normalizer_check(const std::vector<double>& C_grid, double d) {
  if (!(d > 0.0)) throw DomainError("d must be positive");
  if (C_grid.size() < 2) throw DomainError("C grid needs at least two points");
  for (std::size_t j = 1; j < C_grid.size(); ++j) {
    if (!(C_grid[j] > C_grid[j - 1])) throw DomainError("C grid must be increasing");
  }
  if (!(C_grid.front() > 0.0) || C_grid.back() / C_grid.front() < 1e3 * (1 - 1e-12)) {
    throw DomainError("C grid must be positive and span at least three decades");
  }

  AsymptoticFit fit;
  fit.C = C_grid;
  const int n = static_cast<int>(C_grid.size());
  Matrix design(n, 2);
  Vector excess(n);
  for (int j = 0; j < n; ++j) {
    const ThetaSeries series(ThetaSpec::power(1.0, d), std::log(C_grid[j]));
    const double g = sum_with_tail_bound(series, 1e-15).log_sum;
    fit.g.push_back(g);
    design(j, 0) = std::log(C_grid[j]);
    design(j, 1) = 1.0;
    excess[j] = g - d * std::pow(C_grid[j], 1.0 / d);
  }
  const Vector coef = design.colPivHouseholderQr().solve(excess);
  fit.a = coef[0];
  fit.b = coef[1];
  fit.max_fit_residual = (design * coef - excess).lpNorm<Eigen::Infinity>();
  const double c_max = C_grid.back();
  const double g_max = fit.g.back();
  const double leading = d * std::pow(c_max, 1.0 / d);
  fit.leading_rel_error = std::abs(g_max - leading) / std::abs(g_max);
  fit.corrected_rel_error =
      std::abs(g_max - (leading + fit.a * std::log(c_max) + fit.b)) / std::abs(g_max);
  return fit;
}

NormalizerGap theta_vs_power_normalizer_check(const KineticsSpec& kin, const Vector& d,
                                              const Vector& A, const Vector& c,
                                              const std::vector<double>& volumes,
                                              double rel_tol) {
  const int m = kin.num_species();
  if (d.size() != m || A.size() != m || c.size() != m) {
    throw DomainError("d, A and c need one entry per species");
  }
  if ((c.array() <= 0.0).any() || (d.array() <= 0.0).any() || (A.array() <= 0.0).any()) {
    throw DomainError("d, A and c must be positive");
  }
  for (int i = 0; i < m; ++i) {
    if (kin.thetas[i].tail_d != d[i] || kin.thetas[i].tail_A != A[i]) {
      throw DomainError("theta tails must match the power law being compared against");
    }
  }
  std::vector<ThetaSpec> powers;
  for (int i = 0; i < m; ++i) powers.push_back(ThetaSpec::power(A[i], d[i]));

  NormalizerGap result;
  result.volumes = volumes;
  for (double v : volumes) {
    const Vector log_c = c.array().log() + d.array() * std::log(v);
    const double log_theta = normalize(StationaryMeasure(kin.thetas, log_c), rel_tol)
                                 .normalization()->log_M;
    const double log_power =
        normalize(StationaryMeasure(powers, log_c), rel_tol).normalization()->log_M;
    result.gaps.push_back(std::abs(log_theta - log_power) / v);
    result.max_gap = std::max(result.max_gap, result.gaps.back());
  }
  result.eventually_decreasing = eventually_decreasing(result.gaps);
  return result;
}

}  // namespace crn
