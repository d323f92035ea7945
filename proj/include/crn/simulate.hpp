#pragma once

#include "crn/kinetics.hpp"
#include "crn/network.hpp"
#include "crn/scaling.hpp"
#include "crn/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace crn {

struct SimConfig {
  double t_final = 1.0;
  State x0;
  std::uint64_t seed = 0;
  double burn_in = 0.0;
  // Stop (and flag) once any species count exceeds this.
  std::optional<int> cap;
  bool record_events = true;

  void validate(int num_species) const;
};

struct Event {
  double time = 0.0;
  int reaction = -1;

  friend bool operator==(const Event&, const Event&) = default;
};

// Fraction of [burn_in, end] spent in each state.
struct OccupationMeasure {
  std::map<State, double, StateLess> fraction;
  double total_time = 0.0;
};

struct SsaPath {
  std::vector<Event> events;
  std::size_t num_events = 0;
  OccupationMeasure occupation;
  State final_state;
  double end_time = 0.0;
  bool absorbed = false;  // total intensity hit zero
  bool cap_hit = false;
};

/// Gillespie direct method: exponential holding time with the total rate,
/// reaction k chosen with probability lambda_k / Lambda. Deterministic in
/// (network, kinetics, config). An absorbing state keeps accumulating
/// occupation until t_final; a cap hit ends the path early.
SsaPath ssa_path(const ReactionNetwork& net, const KineticsSpec& kin, const SimConfig& cfg);

struct TerminalHistogram {
  std::map<State, long, StateLess> counts;
  long paths = 0;
  long absorbed = 0;
  long capped = 0;
};

// Seed for path `index` of an ensemble.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

/// X(t_final) over n_paths independent paths; path i uses
/// path_seed(cfg.seed, i), so the histogram does not depend on `threads`.
TerminalHistogram ensemble_terminal(const ReactionNetwork& net, const KineticsSpec& kin,
                                    const SimConfig& cfg, long n_paths,
                                    unsigned threads = 1);

struct OdeModel {
  enum class Mode { mass_action, generalized };
  Mode mode = Mode::mass_action;
  Vector d;
  Vector A;

  static OdeModel mass_action() { return {}; }
  static OdeModel generalized(Vector d, Vector A) {
    return {Mode::generalized, std::move(d), std::move(A)};
  }

  Vector rhs(const ReactionNetwork& net, const Vector& x) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
};

/// Classic fixed-step RK4 from x0 to t_final; one sample per step, the last
/// step shortened to land on t_final. Throws NumericalError if a component
/// drops below -1e-9.
Trajectory integrate_ode(const ReactionNetwork& net, const OdeModel& model,
                         const Vector& x0, double t_final, double dt);

struct LyapunovTrace {
  std::vector<double> values;
  bool non_increasing = false;
  double max_increase = 0.0;
};

// V(x(t)) along the trajectory; passes iff no step increases V by > 1e-9.
LyapunovTrace lyapunov_along_trajectory(const Trajectory& traj, const LyapunovSpec& spec);

}  // namespace crn
