#include "crn/kinetics.hpp"

#include "crn/errors.hpp"

#include <cmath>
#include <limits>

namespace crn {

double ThetaSpec::operator()(long x) const {
  if (x <= 0) return 0.0;
  if (auto it = overrides.find(x); it != overrides.end()) return it->second;
  return tail_A * std::pow(static_cast<double>(x), tail_d);
}

double ThetaSpec::log_value(long x) const {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  if (auto it = overrides.find(x); it != overrides.end()) return std::log(it->second);
  return std::log(tail_A) + tail_d * std::log(static_cast<double>(x));
}

double ThetaSpec::log_factorial(long x) const {
  if (x <= 0) return 0.0;
  // Power tail in closed form, then swap in the overridden factors.
  double total = static_cast<double>(x) * std::log(tail_A) +
                 tail_d * std::lgamma(static_cast<double>(x) + 1.0);
  for (const auto& [j, value] : overrides) {
    if (j > x) break;
    total += std::log(value) -
             (std::log(tail_A) + tail_d * std::log(static_cast<double>(j)));
  }
  return total;
}

double ThetaSpec::log_factorial_span(long lo, long hi) const {
  double total = 0.0;
  for (long j = std::max(lo, 0L) + 1; j <= hi; ++j) total += log_value(j);
  return total;
}

bool ThetaSpec::has_interior_zero() const {
  for (const auto& entry : overrides) {
    if (entry.second == 0.0) return true;
  }
  return false;
}

KineticsSpec::Mode KineticsSpec::mode() const {
  for (const auto& theta : thetas) {
    if (!theta.is_mass_action()) return Mode::general;
  }
  return Mode::mass_action;
}

Vector KineticsSpec::tail_exponents() const {
  Vector d(num_species());
  for (int i = 0; i < num_species(); ++i) d[i] = thetas[i].tail_d;
  return d;
}

Vector KineticsSpec::tail_prefactors() const {
  Vector A(num_species());
  for (int i = 0; i < num_species(); ++i) A[i] = thetas[i].tail_A;
  return A;
}

ScalingConfig ScalingConfig::classical(double volume, int num_species) {
  return {volume, Vector::Ones(num_species), Vector::Ones(num_species), Mode::classical};
}

ScalingConfig ScalingConfig::modified(double volume, Vector d, Vector A) {
  return {volume, std::move(d), std::move(A), Mode::modified};
}

void ScalingConfig::validate(int num_species) const {
  if (!(volume > 0.0)) throw DomainError("scaling volume must be positive");
  if (d.size() != num_species || A.size() != num_species) {
    throw DomainError("scaling vectors d and A must have one entry per species");
  }
  if ((d.array() <= 0.0).any() || (A.array() <= 0.0).any()) {
    throw DomainError("scaling vectors d and A must be positive");
  }
  if (mode == Mode::classical && (d.array() != 1.0).any()) {
    throw DomainError("classical scaling requires d = (1,...,1)");
  }
}

double falling_theta_product(const ThetaSpec& theta, long x, int y) {
  double product = 1.0;
  for (int j = 0; j < y; ++j) {
    const long arg = x - j;
    if (arg <= 0) return 0.0;
    product *= theta(arg);
  }
  return product;
}

double intensity(const ReactionNetwork& net, const KineticsSpec& kin, int k,
                 const State& x) {
  const Reaction& r = net.reaction(k);
  double value = r.rate;
  for (int i = 0; i < net.num_species(); ++i) {
    const int y = r.source[i];
    if (y == 0) continue;
    if (x[i] < y) return 0.0;
    value *= falling_theta_product(kin.thetas[i], x[i], y);
  }
  return value;
}

double total_intensity(const ReactionNetwork& net, const KineticsSpec& kin,
                       const State& x) {
  double total = 0.0;
  for (int k = 0; k < net.num_reactions(); ++k) total += intensity(net, kin, k, x);
  return total;
}

double scaled_intensity(const ReactionNetwork& net, const KineticsSpec& kin,
                        const ScalingConfig& cfg, int k, const State& x) {
  const double exponent = cfg.d.dot(net.reaction(k).source.cast<double>()) - 1.0;
  return intensity(net, kin, k, x) * std::pow(cfg.volume, -exponent);
}

double generalized_ode_rate(const ReactionNetwork& net, int k, const Vector& x,
                            const Vector& d, const Vector& A) {
  const Reaction& r = net.reaction(k);
  double value = r.rate;
  for (int i = 0; i < net.num_species(); ++i) {
    const int y = r.source[i];
    if (y == 0) continue;
    const double power = d[i] * y;
    if (x[i] <= 0.0 && power != std::floor(power)) {
      throw DomainError("generalized rate needs x > 0 for non-integer powers");
    }
    value *= std::pow(A[i], y) * std::pow(x[i], power);
  }
  return value;
}

}  // namespace crn
