#include "crn/simulate.hpp"

#include "crn/equilibrium.hpp"
#include "crn/errors.hpp"
#include "crn/parallel.hpp"

#include <cmath>
#include <random>

namespace crn {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform on (0, 1); 53 random bits, never exactly 0.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

void SimConfig::validate(int num_species) const {
  if (!(t_final > 0.0)) throw DomainError("t_final must be positive");
  if (!(burn_in >= 0.0) || !(burn_in < t_final)) {
    throw DomainError("burn_in must satisfy 0 <= burn_in < t_final");
  }
  if (x0.size() != num_species) throw DomainError("x0 has wrong length");
  if (!nonnegative(x0)) throw DomainError("x0 must be nonnegative");
  if (cap && *cap < 0) throw DomainError("cap must be nonnegative");
}

// ssa_path mixes the seed, so consecutive seeds give unrelated streams.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) { return seed + index; }

SsaPath ssa_path(const ReactionNetwork& net, const KineticsSpec& kin, const SimConfig& cfg) {
  cfg.validate(net.num_species());
  std::mt19937_64 rng(splitmix64(cfg.seed));
  const int K = net.num_reactions();
  std::vector<IntVector> jumps;
  for (int k = 0; k < K; ++k) jumps.push_back(net.reaction_vector(k));

  SsaPath path;
  State x = cfg.x0;
  double t = 0.0;
  std::vector<double> rates(K);
  std::map<State, double, StateLess> time_in;

  auto occupy = [&](const State& state, double from, double to) {
    const double lo = std::max(from, cfg.burn_in);
    if (to > lo) time_in[state] += to - lo;
  };

  while (true) {
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      rates[k] = intensity(net, kin, k, x);
      total += rates[k];
    }
    if (total <= 0.0) {
      occupy(x, t, cfg.t_final);
      t = cfg.t_final;
      path.absorbed = true;
      break;
    }
    const double dwell = -std::log(open_uniform(rng)) / total;
    if (t + dwell >= cfg.t_final) {
      occupy(x, t, cfg.t_final);
      t = cfg.t_final;
      break;
    }
    occupy(x, t, t + dwell);
    t += dwell;

    double target = open_uniform(rng) * total;
    int chosen = K - 1;
    for (int k = 0; k < K; ++k) {
      if (target < rates[k]) {
        chosen = k;
        break;
      }
      target -= rates[k];
    }
    // Roundoff can leave `target` past the last nonzero rate.
    while (rates[chosen] == 0.0) --chosen;

    x += jumps[chosen];
    ++path.num_events;
    if (cfg.record_events) path.events.push_back({t, chosen});
    if (cfg.cap && x.maxCoeff() > *cfg.cap) {
      path.cap_hit = true;
      break;
    }
  }

  path.final_state = x;
  path.end_time = t;
  double accounted = 0.0;
  for (const auto& entry : time_in) accounted += entry.second;
  path.occupation.total_time = accounted;
  if (accounted > 0.0) {
    for (const auto& [state, dt] : time_in) path.occupation.fraction[state] = dt / accounted;
  }
  return path;
}

TerminalHistogram ensemble_terminal(const ReactionNetwork& net, const KineticsSpec& kin,
                                    const SimConfig& cfg, long n_paths, unsigned threads) {
  if (n_paths < 1) throw DomainError("ensemble needs at least one path");
  cfg.validate(net.num_species());
  std::vector<SsaPath> finals(n_paths);
  parallel_for(static_cast<std::size_t>(n_paths), threads, [&](std::size_t i) {
    SimConfig path_cfg = cfg;
    path_cfg.seed = path_seed(cfg.seed, i);
    path_cfg.record_events = false;
    SsaPath p = ssa_path(net, kin, path_cfg);
    p.occupation = {};
    finals[i] = std::move(p);
  });
  TerminalHistogram hist;
  hist.paths = n_paths;
  for (const SsaPath& p : finals) {
    ++hist.counts[p.final_state];
    hist.absorbed += p.absorbed;
    hist.capped += p.cap_hit;
  }
  return hist;
}

Vector OdeModel::rhs(const ReactionNetwork& net, const Vector& x) const {
  const Vector clamped = x.cwiseMax(0.0);
  if (mode == Mode::mass_action) return ode_rhs(net, clamped);
  return generalized_ode_rhs(net, clamped, d, A);
}

Trajectory integrate_ode(const ReactionNetwork& net, const OdeModel& model,
                         const Vector& x0, double t_final, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(t_final > 0.0)) throw DomainError("t_final must be positive");
  if (x0.size() != net.num_species()) throw DomainError("x0 has wrong length");
  if ((x0.array() <= 0.0).any()) throw DomainError("x0 must be positive");
  if (model.mode == OdeModel::Mode::generalized &&
      (model.d.size() != x0.size() || model.A.size() != x0.size())) {
    throw DomainError("generalized model needs d and A for every species");
  }

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  Vector x = x0;
  const long steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  for (long n = 0; n < steps; ++n) {
    const double t = n * dt;
    const double h = std::min(dt, t_final - t);
    const Vector k1 = model.rhs(net, x);
    const Vector k2 = model.rhs(net, x + 0.5 * h * k1);
    const Vector k3 = model.rhs(net, x + 0.5 * h * k2);
    const Vector k4 = model.rhs(net, x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (x.minCoeff() < -1e-9 || !x.allFinite()) {
      throw NumericalError("ODE state left the positive orthant at t = " +
                           std::to_string(t + h) + "; use a smaller dt");
    }
    traj.times.push_back(n + 1 == steps ? t_final : t + h);
    traj.states.push_back(x);
  }
  return traj;
}

LyapunovTrace lyapunov_along_trajectory(const Trajectory& traj, const LyapunovSpec& spec) {
  LyapunovTrace trace;
  for (const Vector& x : traj.states) {
    if ((x.array() <= 0.0).any()) throw DomainError("trajectory must stay positive");
    trace.values.push_back(lyapunov(spec, x));
  }
  for (std::size_t i = 1; i < trace.values.size(); ++i) {
    trace.max_increase = std::max(trace.max_increase, trace.values[i] - trace.values[i - 1]);
  }
  trace.non_increasing = trace.max_increase <= 1e-9;
  return trace;
}

}  // namespace crn
