#include "crn/dsl.hpp"
#include "crn/equilibrium.hpp"
#include "crn/errors.hpp"
#include "crn/scaling.hpp"
#include "crn/simulate.hpp"
#include "crn/stationary.hpp"
#include "crn/structure.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::ordered_json;

namespace crn {
namespace {

enum Exit { ok = 0, usage = 1, parse = 2, numerical = 3, consistency = 4 };

// Failure with an exit code and a JSON context, reported on stderr.
struct CliFailure {
  int code;
  std::string message;
  ordered_json context = ordered_json::object();
};

struct Output {
  std::string path;
  std::string format = "json";
  std::ostringstream buffer;

  void json(const ordered_json& doc) {
    if (format == "human") {
      for (const auto& [key, value] : doc.items()) {
        buffer << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump())
               << "\n";
      }
    } else {
      buffer << doc.dump(2) << "\n";
    }
  }

  void flush() {
    if (path.empty()) {
      std::cout << buffer.str();
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliFailure{usage, "cannot open output file", {{"path", path}}};
    out << buffer.str();
  }
};

double parse_real(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw CliFailure{usage, "expected a number", {{"flag", what}, {"value", text}}};
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    parts.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return parts;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_real(part, what));
  if (values.empty()) throw CliFailure{usage, "empty list", {{"flag", what}}};
  return values;
}

// "A=2,B=1" by species name, or "2,1" in species order. Species missing from
// the named form take `fill`.
Vector parse_species_vector(const ReactionNetwork& net, const std::string& text,
                            const std::string& what, double fill) {
  const int m = net.num_species();
  if (text.find('=') == std::string::npos) {
    std::vector<double> values = parse_list(text, what);
    if (values.size() == 1 && m > 1) values.assign(m, values[0]);
    if (static_cast<int>(values.size()) != m) {
      throw CliFailure{usage, "wrong number of entries", {{"flag", what}, {"expected", m}}};
    }
    return Eigen::Map<Vector>(values.data(), m);
  }
  Vector v = Vector::Constant(m, fill);
  for (const auto& part : split(text, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw CliFailure{usage, "expected NAME=VALUE", {{"flag", what}, {"value", part}}};
    }
    const std::string name = split(part.substr(0, eq), ' ').front();
    const auto index = net.species_index(name);
    if (!index) throw CliFailure{usage, "unknown species", {{"flag", what}, {"species", name}}};
    v[*index] = parse_real(split(part.substr(eq + 1), ' ').back(), what);
  }
  return v;
}

State parse_state(const ReactionNetwork& net, const std::string& text, const std::string& what) {
  const Vector v = parse_species_vector(net, text, what, 0.0);
  State x(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0 || v[i] != std::floor(v[i]) || v[i] > 1e9) {
      throw CliFailure{usage, "state entries must be nonnegative integers", {{"flag", what}}};
    }
    x[i] = static_cast<int>(v[i]);
  }
  return x;
}

// "100x100", or a single count used on every axis.
std::vector<int> parse_counts(const std::string& text, int m, const std::string& what) {
  std::vector<int> counts;
  for (const auto& part : split(text, 'x')) {
    const double v = parse_real(part, what);
    if (v < 1.0 || v != std::floor(v)) {
      throw CliFailure{usage, "counts must be positive integers", {{"flag", what}}};
    }
    counts.push_back(static_cast<int>(v));
  }
  if (counts.size() == 1) counts.assign(m, counts[0]);
  if (static_cast<int>(counts.size()) != m) {
    throw CliFailure{usage, "one count per species expected", {{"flag", what}, {"expected", m}}};
  }
  return counts;
}

// "lo:hi:logN" or "lo:hi:linN".
std::vector<double> parse_range_grid(const std::string& text, const std::string& what) {
  const auto parts = split(text, ':');
  if (parts.size() != 3 || parts[2].size() < 4) {
    throw CliFailure{usage, "expected lo:hi:logN or lo:hi:linN", {{"flag", what}}};
  }
  const double lo = parse_real(parts[0], what), hi = parse_real(parts[1], what);
  const std::string kind = parts[2].substr(0, 3);
  const double n = parse_real(parts[2].substr(3), what);
  if ((kind != "log" && kind != "lin") || n < 2 || n != std::floor(n) || !(lo < hi) ||
      (kind == "log" && lo <= 0.0)) {
    throw CliFailure{usage, "bad grid", {{"flag", what}, {"value", text}}};
  }
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = static_cast<double>(i) / (grid.size() - 1);
    grid[i] = kind == "log" ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                            : lo + t * (hi - lo);
  }
  grid.back() = hi;
  return grid;
}

unsigned threads_from_env() {
  const char* env = std::getenv("CRN_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  const double v = parse_real(env, "CRN_THREADS");
  if (v < 1.0 || v != std::floor(v)) {
    throw CliFailure{usage, "CRN_THREADS must be a positive integer", {{"value", env}}};
  }
  return static_cast<unsigned>(v);
}

ordered_json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
ordered_json to_json(const State& x) { return std::vector<int>(x.data(), x.data() + x.size()); }

// Finite doubles as numbers, overflow as null.
ordered_json real(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

struct Model {
  ParsedNetwork parsed;
  const ReactionNetwork& net() const { return parsed.network; }
  const KineticsSpec& kin() const { return parsed.kinetics; }
};

Model load(const std::string& path) { return Model{load_network(path)}; }

// c from --c, or the positive equilibrium of the mass-action system.
Vector equilibrium_or(const Model& model, const std::string& c_text) {
  if (!c_text.empty()) {
    const Vector c = parse_species_vector(model.net(), c_text, "--c", 1.0);
    if ((c.array() <= 0.0).any()) throw CliFailure{usage, "c must be positive", {{"flag", "--c"}}};
    return c;
  }
  const auto eq = find_positive_equilibrium(model.net());
  if (!eq.converged) {
    throw CliFailure{numerical,
                     "equilibrium solve did not converge",
                     {{"iterations", eq.iterations}, {"residual_ode", eq.residual_ode}}};
  }
  return eq.c;
}

Vector tail_or(const Model& model, const std::string& text, const std::string& flag,
               bool exponents) {
  if (!text.empty()) return parse_species_vector(model.net(), text, flag, 1.0);
  return exponents ? model.kin().tail_exponents() : model.kin().tail_prefactors();
}

ordered_json species_json(const Model& model) { return model.net().species(); }

// ---- subcommands ---------------------------------------------------------

struct Options {
  std::string file;
  std::string anchor, x0, c, range = "0.01:10", grid = "100", volumes = "10,100,1000,10000";
  std::string d, A, C = "10:10000:log20", mode;
  double tol = 0.0, t = 0.0, burn = 0.0, dt = 1e-3, xt_value = 0.0, rel_tol = 1e-12;
  std::string xt;
  int max_iter = 200, box = 30;
  std::uint64_t seed = 42;
  long paths = 1;
  std::optional<int> cap;
  bool emit_plot_data = false;
};

void cmd_analyze(const Options& o, Output& out) {
  const Model model = load(o.file);
  const StructureReport r = deficiency(model.net());
  const Matrix W = conservation_laws(model.net());
  ordered_json laws = ordered_json::array();
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    std::vector<long> row;
    for (Eigen::Index j = 0; j < W.cols(); ++j) row.push_back(std::lround(W(i, j)));
    laws.push_back(row);
  }
  ordered_json complexes = ordered_json::array();
  for (const auto& z : model.net().complexes()) complexes.push_back(to_json(State(z)));
  out.json({{"species", species_json(model)},
            {"complexes", r.num_complexes},
            {"linkage_classes", r.num_linkage_classes},
            {"stoich_dim", r.stoich_dim},
            {"deficiency", r.deficiency},
            {"weakly_reversible", r.weakly_reversible},
            {"classes", r.linkage_partition},
            {"complex_vectors", complexes},
            {"conservation_laws", laws}});
}

void cmd_equilibrium(const Options& o, Output& out) {
  const Model model = load(o.file);
  EquilibriumOptions opt;
  if (!o.x0.empty()) opt.x0 = parse_species_vector(model.net(), o.x0, "--x0", 1.0);
  if (!o.anchor.empty()) opt.anchor = parse_species_vector(model.net(), o.anchor, "--anchor", 0.0);
  opt.tol = o.tol;
  opt.max_iter = o.max_iter;
  const auto r = find_positive_equilibrium(model.net(), opt);
  out.json({{"species", species_json(model)},
            {"c", to_json(r.c)},
            {"residual_ode", r.residual_ode},
            {"residual_cb", r.residual_cb},
            {"complex_balanced", r.complex_balanced},
            {"converged", r.converged},
            {"iterations", r.iterations}});
  if (!r.converged) {
    throw CliFailure{numerical,
                     "equilibrium solve did not converge",
                     {{"iterations", r.iterations}, {"residual_ode", r.residual_ode}}};
  }
}

void cmd_check_balance(const Options& o, Output& out) {
  const Model model = load(o.file);
  const Vector c = equilibrium_or(model, o.c);
  const auto r = is_complex_balanced(model.net(), c, o.tol);
  out.json({{"species", species_json(model)},
            {"c", to_json(c)},
            {"complex_balanced", r.balanced},
            {"max_rel_gap", r.max_rel_gap},
            {"gaps", r.gaps}});
}

void cmd_stationary(const Options& o, Output& out) {
  const Model model = load(o.file);
  const Vector c = equilibrium_or(model, o.c);
  const auto measure = normalize(product_measure(model.net(), model.kin(), c), o.tol);
  const Normalization& n = *measure.normalization();
  out.json({{"species", species_json(model)},
            {"c", to_json(c)},
            {"complex_balanced", is_complex_balanced(model.net(), c).balanced},
            {"logM", n.log_M},
            {"M", real(n.M)},
            {"truncation", n.truncation},
            {"tail_bound", real(n.tail_bound)},
            {"rel_tail_bound", n.rel_tail_bound}});
}

void cmd_residual(const Options& o, Output& out) {
  const Model model = load(o.file);
  const Vector c = equilibrium_or(model, o.c);
  const auto measure = product_measure(model.net(), model.kin(), c);
  const std::vector<int> box(model.net().num_species(), o.box);
  const auto scan = max_residual_in_box(model.net(), model.kin(), measure, box);
  out.json({{"c", to_json(c)},
            {"box", box},
            {"points", scan.points},
            {"max_rel_residual", scan.max_residual},
            {"argmax_state", to_json(scan.argmax)}});
}

void cmd_oracle(const Options& o, Output& out) {
  const Model model = load(o.file);
  const Vector c = equilibrium_or(model, o.c);
  const std::vector<int> box(model.net().num_species(), o.box);
  std::optional<State> anchor;
  if (!o.anchor.empty()) anchor = parse_state(model.net(), o.anchor, "--anchor");
  const auto chain = build_truncated_chain(model.net(), model.kin(), box, anchor);
  const Vector p = oracle_stationary(chain);
  const double tv =
      tv_to_truncated_measure(chain, p, product_measure(model.net(), model.kin(), c));
  out.json({{"c", to_json(c)},
            {"box", box},
            {"states", chain.num_states()},
            {"tv_distance", tv}});
}

void cmd_nonexplosive(const Options& o, Output& out) {
  const Model model = load(o.file);
  const Vector c = equilibrium_or(model, o.c);
  auto measure = product_measure(model.net(), model.kin(), c);
  const bool normalizable = (model.kin().tail_exponents().array() > 0.0).all();
  if (normalizable) measure = normalize(measure, o.tol);
  const auto r = nonexplosivity_sum(model.net(), model.kin(), measure, o.tol);
  ordered_json doc{{"c", to_json(c)},
                   {"finite", r.finite},
                   {"estimate", real(r.estimate)},
                   {"bound", real(r.bound)},
                   {"truncation", r.truncation}};
  if (!r.finite) doc["reason"] = r.reason;
  out.json(doc);
}

void cmd_converse(const Options& o, Output& out) {
  const Model model = load(o.file);
  const Vector c = equilibrium_or(model, o.c);
  const std::vector<int> box(model.net().num_species(), o.box);
  const auto r = converse_check(model.net(), model.kin(), c, box, o.tol);
  out.json({{"c", to_json(c)},
            {"stationary", r.stationary},
            {"complex_balanced", r.complex_balanced},
            {"max_residual", r.max_residual},
            {"argmax_state", to_json(r.argmax)},
            {"max_balance_gap", r.max_balance_gap},
            {"agree", r.agree()}});
  if (!r.agree()) {
    throw CliFailure{consistency,
                     "stationarity of the product form and complex balance disagree",
                     {{"stationary", r.stationary}, {"complex_balanced", r.complex_balanced}}};
  }
}

// The closed-form measure is the stationary distribution when the chain has
// a single infinite class: no conservation laws and a complex balanced
// equilibrium with normalizable kinetics.
std::optional<StationaryMeasure> stationary_if_available(const Model& model) {
  if (conservation_laws(model.net()).rows() > 0) return std::nullopt;
  if ((model.kin().tail_exponents().array() <= 0.0).any()) return std::nullopt;
  const auto eq = find_positive_equilibrium(model.net());
  if (!eq.converged || !eq.complex_balanced) return std::nullopt;
  return normalize(product_measure(model.net(), model.kin(), eq.c));
}

void cmd_simulate(const Options& o, Output& out) {
  const Model model = load(o.file);
  SimConfig cfg;
  cfg.t_final = o.t;
  cfg.burn_in = o.burn;
  cfg.seed = o.seed;
  cfg.cap = o.cap;
  cfg.record_events = false;
  cfg.x0 = o.x0.empty() ? State::Zero(model.net().num_species())
                        : parse_state(model.net(), o.x0, "--x0");
  const auto pi = stationary_if_available(model);

  if (o.paths > 1) {
    const auto hist = ensemble_terminal(model.net(), model.kin(), cfg, o.paths, threads_from_env());
    ordered_json rows = ordered_json::array();
    std::map<State, double, StateLess> freq;
    for (const auto& [x, n] : hist.counts) {
      rows.push_back({{"state", to_json(x)}, {"count", n}});
      freq[x] = static_cast<double>(n) / hist.paths;
    }
    ordered_json doc{{"species", species_json(model)},
                     {"paths", hist.paths},
                     {"seed", o.seed},
                     {"t_final", o.t},
                     {"absorbed", hist.absorbed},
                     {"capped", hist.capped},
                     {"terminal", rows}};
    doc["tv_distance"] = pi ? ordered_json(tv_to_measure(freq, *pi)) : ordered_json(nullptr);
    out.json(doc);
    return;
  }

  const auto path = ssa_path(model.net(), model.kin(), cfg);
  ordered_json rows = ordered_json::array();
  for (const auto& [x, f] : path.occupation.fraction) {
    rows.push_back({{"state", to_json(x)}, {"fraction", f}});
  }
  ordered_json doc{{"species", species_json(model)},
                   {"seed", o.seed},
                   {"t_final", o.t},
                   {"burn_in", o.burn},
                   {"events", path.num_events},
                   {"end_time", path.end_time},
                   {"absorbed", path.absorbed},
                   {"cap_hit", path.cap_hit},
                   {"final_state", to_json(path.final_state)},
                   {"total_time", path.occupation.total_time},
                   {"occupation", rows}};
  doc["tv_distance"] =
      pi ? ordered_json(tv_to_measure(path.occupation.fraction, *pi)) : ordered_json(nullptr);
  out.json(doc);
}

std::string csv_real(double v) { return format_real(v); }

void cmd_ode(const Options& o, Output& out) {
  const Model model = load(o.file);
  const int m = model.net().num_species();
  const Vector x0 = o.x0.empty() ? Vector::Ones(m)
                                 : parse_species_vector(model.net(), o.x0, "--x0", 1.0);
  const bool generalized = o.mode == "generalized";
  const Vector d = generalized ? tail_or(model, o.d, "--d", true) : Vector::Ones(m);
  const Vector A = generalized ? tail_or(model, o.A, "--A", false) : Vector::Ones(m);
  const OdeModel ode = generalized ? OdeModel::generalized(d, A) : OdeModel::mass_action();
  const auto traj = integrate_ode(model.net(), ode, x0, o.t, o.dt);

  std::optional<LyapunovTrace> trace;
  if (o.emit_plot_data) {
    EquilibriumOptions opt;
    opt.anchor = x0;
    const Vector c = o.c.empty() ? find_positive_equilibrium(model.net(), opt).c
                                 : equilibrium_or(model, o.c);
    trace = lyapunov_along_trajectory(traj, LyapunovSpec{c, d, A});
  }
  out.buffer << "t";
  for (const auto& s : model.net().species()) out.buffer << "," << s;
  if (trace) out.buffer << ",V";
  out.buffer << "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out.buffer << csv_real(traj.times[i]);
    for (int j = 0; j < m; ++j) out.buffer << "," << csv_real(traj.states[i][j]);
    if (trace) out.buffer << "," << csv_real(trace->values[i]);
    out.buffer << "\n";
  }
}

ScalingConfig scaling_from(const Model& model, const Options& o) {
  const int m = model.net().num_species();
  if (o.mode == "classical") return ScalingConfig::classical(1.0, m);
  return ScalingConfig::modified(1.0, tail_or(model, o.d, "--d", true),
                                 tail_or(model, o.A, "--A", false));
}

void cmd_potential_scan(const Options& o, Output& out) {
  const Model model = load(o.file);
  const Vector c = equilibrium_or(model, o.c);
  const Vector xt = parse_species_vector(model.net(), o.xt, "--xt", 1.0);
  const auto volumes = parse_list(o.volumes, "--V");
  const ScalingConfig cfg = scaling_from(model, o);
  const auto scan = potential_scan(model.net(), model.kin(), cfg, c, xt, volumes, o.rel_tol,
                                   threads_from_env());
  out.buffer << "V,x_lattice,potential,limit,error\n";
  std::vector<double> errors;
  for (const auto& row : scan.rows) {
    std::string lattice;
    for (Eigen::Index i = 0; i < row.x_lattice.size(); ++i) {
      lattice += (i ? ";" : "") + csv_real(row.x_lattice[i]);
    }
    out.buffer << csv_real(row.volume) << "," << lattice << "," << csv_real(row.potential) << ","
               << csv_real(row.limit) << "," << csv_real(row.error) << "\n";
    errors.push_back(row.error);
  }
  const ordered_json summary{{"mode", o.mode},
                             {"c", to_json(c)},
                             {"x_target", to_json(xt)},
                             {"d", to_json(cfg.d)},
                             {"A", to_json(cfg.A)},
                             {"errors", errors},
                             {"eventually_decreasing", scan.eventually_decreasing}};
  out.buffer << "# summary " << summary.dump() << "\n";
}

void cmd_lyapunov_check(const Options& o, Output& out) {
  const Model model = load(o.file);
  const int m = model.net().num_species();
  const Vector c = equilibrium_or(model, o.c);
  const Vector d = tail_or(model, o.d, "--d", true);
  const Vector A = tail_or(model, o.A, "--A", false);
  const auto range = split(o.range, ':');
  if (range.size() != 2) throw CliFailure{usage, "expected lo:hi", {{"flag", "--range"}}};
  const double lo = parse_real(range[0], "--range"), hi = parse_real(range[1], "--range");
  if (!(lo > 0.0 && lo < hi)) throw CliFailure{usage, "need 0 < lo < hi", {{"flag", "--range"}}};
  const auto grid = box_grid(lo, hi, parse_counts(o.grid, m, "--grid"));
  const auto r = lyapunov_descent_check(model.net(), LyapunovSpec{c, d, A}, grid);
  const bool balanced = is_complex_balanced(model.net(), c).balanced;
  const bool passed = r.max_value <= o.tol;
  out.json({{"c", to_json(c)},
            {"d", to_json(d)},
            {"A", to_json(A)},
            {"points", r.points},
            {"max_value", r.max_value},
            {"argmax", to_json(r.argmax)},
            {"complex_balanced", balanced},
            {"passed", passed}});
  if (balanced && !passed) {
    throw CliFailure{consistency,
                     "Lyapunov descent fails at a complex balanced equilibrium",
                     {{"max_value", r.max_value}, {"tol", o.tol}}};
  }
}

void cmd_asympt_check(const Options& o, Output& out) {
  const auto grid = parse_range_grid(o.C, "--C");
  const double d = parse_real(o.d.empty() ? "2" : o.d, "--d");
  const auto fit = asymptotic_normalizer_check(grid, d);
  out.json({{"d", d},
            {"a", fit.a},
            {"b", fit.b},
            {"max_fit_residual", fit.max_fit_residual},
            {"leading_rel_error", fit.leading_rel_error},
            {"corrected_rel_error", fit.corrected_rel_error},
            {"C", fit.C},
            {"g", fit.g}});
}

ordered_json error_json(int code, const std::string& message, const ordered_json& context) {
  return {{"code", code}, {"message", message}, {"context", context}};
}

int run(int argc, char** argv) {
  CLI::App app{"Reaction network analysis: structure, equilibria, stationary measures, "
               "scaling limits and simulation."};
  app.require_subcommand(1);
  app.fallthrough();
  Output out;
  app.add_option("--out", out.path, "Write output to this file instead of stdout");
  app.add_option("--format", out.format, "json or human (JSON-producing commands)")
      ->check(CLI::IsMember({"json", "human"}))
      ->capture_default_str();

  // One Options per subcommand: CLI11 writes defaults into the bound
  // variables when the options are declared.
  std::deque<Options> store;
  Options* chosen = nullptr;
  std::function<void(const Options&, Output&)> action;
  auto command = [&](const char* name, const char* help, void (*body)(const Options&, Output&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    Options* opts = &store.emplace_back();
    sub->callback([&action, &chosen, opts, body] {
      action = body;
      chosen = opts;
    });
    return std::pair<CLI::App*, Options*>{sub, opts};
  };
  auto file = [](CLI::App* sub, Options& o) {
    sub->add_option("network", o.file, "Network file")->required();
  };
  auto c_flag = [](CLI::App* sub, Options& o) {
    sub->add_option("--c", o.c, "Equilibrium c: \"1,2\" or \"A=1,B=2\" (default: Newton solve)");
  };
  auto box_flag = [](CLI::App* sub, Options& o, int def) {
    o.box = def;
    sub->add_option("--box", o.box, "Per-species box cap N")
        ->check(CLI::Range(0, 100000))
        ->capture_default_str();
  };

  {
    auto [analyze, o] = command("analyze", "Complexes, linkage classes, deficiency", cmd_analyze);
    file(analyze, *o);
  }

  {
    auto [equilibrium, o] =
        command("equilibrium", "Positive equilibrium by damped Newton", cmd_equilibrium);
    file(equilibrium, *o);
    equilibrium->add_option("--anchor", o->anchor, "Class anchor, e.g. \"A=2,B=1\" (default: x0)");
    equilibrium->add_option("--x0", o->x0, "Initial guess (default: all ones)");
    equilibrium->add_option("--tol", o->tol, "Residual tolerance")->default_val(1e-12);
    equilibrium->add_option("--max-iter", o->max_iter, "Newton iterations")->capture_default_str();
  }

  {
    auto [balance, o] = command("check-balance", "Complex balance test at c", cmd_check_balance);
    file(balance, *o);
    c_flag(balance, *o);
    balance->add_option("--tol", o->tol, "Relative gap tolerance")->default_val(1e-9);
  }

  {
    auto [stationary, o] =
        command("stationary", "Normalize the product-form measure", cmd_stationary);
    file(stationary, *o);
    c_flag(stationary, *o);
    stationary->add_option("--tol", o->tol, "Relative tail tolerance")->default_val(1e-12);
  }

  {
    auto [residual, o] =
        command("residual", "Max master-equation residual over a box", cmd_residual);
    file(residual, *o);
    c_flag(residual, *o);
    box_flag(residual, *o, 30);
  }

  {
    auto [oracle, o] = command("oracle", "Truncated-generator stationary distribution", cmd_oracle);
    file(oracle, *o);
    c_flag(oracle, *o);
    box_flag(oracle, *o, 50);
    oracle->add_option("--anchor", o->anchor, "Restrict to the class of this state");
  }

  {
    auto [nonexplosive, o] =
        command("nonexplosive", "Expected total jump rate under pi", cmd_nonexplosive);
    file(nonexplosive, *o);
    c_flag(nonexplosive, *o);
    nonexplosive->add_option("--tol", o->tol, "Relative tail tolerance")->default_val(1e-12);
  }

  {
    auto [converse, o] =
        command("converse", "Stationarity versus complex balance at c", cmd_converse);
    file(converse, *o);
    c_flag(converse, *o);
    box_flag(converse, *o, 25);
    converse->add_option("--tol", o->tol, "Residual tolerance")->default_val(1e-10);
  }

  {
    auto [simulate, o] = command("simulate", "Gillespie simulation", cmd_simulate);
    file(simulate, *o);
    simulate->add_option("--t", o->t, "Final time")->default_val(1e4);
    simulate->add_option("--burn", o->burn, "Burn-in excluded from occupation")->default_val(0.0);
    simulate->add_option("--seed", o->seed, "Random seed")->capture_default_str();
    simulate->add_option("--x0", o->x0, "Initial state, e.g. \"A=0\" (default: zeros)");
    simulate->add_option("--cap", o->cap, "Stop when a count exceeds this");
    simulate->add_option("--paths", o->paths, "Ensemble size; > 1 reports X(t) histogram")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  {
    auto [ode, o] = command("ode", "RK4 trajectory as CSV", cmd_ode);
    file(ode, *o);
    ode->add_option("--x0", o->x0, "Initial point (default: all ones)");
    ode->add_option("--t", o->t, "Final time")->default_val(10.0);
    ode->add_option("--dt", o->dt, "Step size")->capture_default_str();
    ode->add_option("--mode", o->mode, "mass-action or generalized")
        ->check(CLI::IsMember({"mass-action", "generalized"}))
        ->default_val("mass-action");
    ode->add_option("--d", o->d, "Exponents d (default: theta tails)");
    ode->add_option("--A", o->A, "Prefactors A (default: theta tails)");
    c_flag(ode, *o);
    ode->add_flag("--emit-plot-data", o->emit_plot_data, "Append the Lyapunov value V(x) column");
  }

  {
    auto [scan, o] =
        command("potential-scan", "Non-equilibrium potential against V", cmd_potential_scan);
    file(scan, *o);
    c_flag(scan, *o);
    scan->add_option("--xt", o->xt, "Target point x~")->required();
    scan->add_option("--V", o->volumes, "Volumes")->capture_default_str();
    scan->add_option("--mode", o->mode, "modified or classical")
        ->check(CLI::IsMember({"modified", "classical"}))
        ->default_val("modified");
    scan->add_option("--d", o->d, "Exponents d (default: theta tails)");
    scan->add_option("--A", o->A, "Prefactors A (default: theta tails)");
    scan->add_option("--tol", o->rel_tol, "Normalizer relative tolerance")->capture_default_str();
  }

  {
    auto [lyap, o] = command("lyapunov-check", "Max of grad V . f over a grid", cmd_lyapunov_check);
    file(lyap, *o);
    c_flag(lyap, *o);
    lyap->add_option("--grid", o->grid, "Points per axis, e.g. 100x100")->capture_default_str();
    lyap->add_option("--range", o->range, "Axis range lo:hi")->capture_default_str();
    lyap->add_option("--d", o->d, "Exponents d (default: theta tails)");
    lyap->add_option("--A", o->A, "Prefactors A (default: theta tails)");
    lyap->add_option("--tol", o->tol, "Pass threshold")->default_val(1e-12);
  }

  {
    auto [asympt, o] = command("asympt-check", "Fit of ln sum C^x/(x!)^d", cmd_asympt_check);
    asympt->add_option("--d", o->d, "Exponent d")->default_val("2");
    asympt->add_option("--C", o->C, "Grid lo:hi:logN")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json(usage, e.what(), ordered_json::object()).dump() << "\n";
    return usage;
  }

  int code = ok;
  try {
    action(*chosen, out);
  } catch (const CliFailure& f) {
    std::cerr << error_json(f.code, f.message, f.context).dump() << "\n";
    code = f.code;
  } catch (const ParseError& e) {
    ordered_json ctx{{"file", chosen->file}};
    if (e.line() > 0) {
      ctx["line"] = e.line();
      ctx["column"] = e.column();
    }
    std::cerr << error_json(parse, e.detail(), ctx).dump() << "\n";
    return parse;
  } catch (const NumericalError& e) {
    std::cerr << error_json(numerical, e.what(), {{"file", chosen->file}}).dump() << "\n";
    return numerical;
  } catch (const ConsistencyError& e) {
    std::cerr << error_json(consistency, e.what(), {{"file", chosen->file}}).dump() << "\n";
    return consistency;
  } catch (const DomainError& e) {
    std::cerr << error_json(usage, e.what(), {{"file", chosen->file}}).dump() << "\n";
    return usage;
  }
  // Results computed before a diagnostic are still written.
  out.flush();
  return code;
}

}  // namespace
}  // namespace crn

int main(int argc, char** argv) {
  try {
    return crn::run(argc, argv);
  } catch (const crn::CliFailure& f) {
    std::cerr << crn::error_json(f.code, f.message, f.context).dump() << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << crn::error_json(crn::numerical, e.what(), nlohmann::ordered_json::object()).dump()
              << "\n";
    return crn::numerical;
  }
}
