// Command implementations behind the cptclock executable.
//
// Each command takes one JSON object (config file merged with flag
// overrides, flags win), validates it against a per-command key table, and
// writes deterministic CSV/JSON artifacts.
#pragma once

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cptclock/cptclock.hpp"

namespace cptclock::cli {

using json = nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
  kOracleMismatch = 4,
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueType { integer, number, string, number_or_array, optional_number };

struct KeySpec {
  std::string name;
  ValueType type;
  json fallback;  // null means "absent unless given"
  std::function<void(const json&)> check = nullptr;
};

namespace detail {

inline std::function<void(const json&)> in_range(double lo, double hi) {
  return [lo, hi](const json& v) {
    auto check_one = [&](double x) {
      if (!(x >= lo && x <= hi)) {
        std::ostringstream msg;
        msg << "value " << x << " outside [" << lo << ", " << hi << "]";
        throw ConfigError(msg.str());
      }
    };
    if (v.is_array()) {
      for (const auto& x : v) check_one(x.get<double>());
    } else if (!v.is_null()) {
      check_one(v.get<double>());
    }
  };
}

inline std::function<void(const json&)> one_of(std::vector<std::string> choices) {
  return [choices](const json& v) {
    const auto s = v.get<std::string>();
    for (const auto& c : choices) {
      if (c == s) return;
    }
    std::string all;
    for (const auto& c : choices) all += (all.empty() ? "" : "|") + c;
    throw ConfigError("'" + s + "' is not one of " + all);
  };
}

inline std::function<void(const json&)> grid_string() {
  return [](const json& v) {
    try {
      (void)io::parse_grid(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  };
}

constexpr double kPi = std::numbers::pi;
constexpr double kMaxRate = 1e12;

}  // namespace detail

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"fringe",  "pump",     "report",
                                              "husimi",  "mu-sweep", "oracle-check"};
  return names;
}

/// Key tables per command. Every command also accepts "command", "out" and "seed".
inline std::vector<KeySpec> key_specs(const std::string& command) {
  using detail::in_range;
  using detail::one_of;
  const double gamma = lambda::kDefaultGamma;
  std::vector<KeySpec> keys{
      {"command", ValueType::string, command, one_of({command})},
      {"out", ValueType::string, ""},
      {"seed", ValueType::integer, static_cast<std::int64_t>(oracle::kDefaultSeed), in_range(0, 9.0e15)},
  };
  auto add = [&](std::vector<KeySpec> more) { keys.insert(keys.end(), more.begin(), more.end()); };
  const auto protocols = one_of({"conventional", "scsp", "generalized-scsp", "esp"});
  if (command == "fringe") {
    add({{"n_atoms", ValueType::integer, 41, in_range(1, 10000)},
         {"protocol", ValueType::string, "conventional", protocols},
         {"mu", ValueType::optional_number, nullptr, in_range(0, detail::kPi)},
         {"parity_target", ValueType::string, "odd", one_of({"odd", "even"})},
         {"grid", ValueType::string, "0:6.283185307179586:256", detail::grid_string()},
         {"delta", ValueType::number_or_array, nullptr, in_range(-detail::kMaxRate, detail::kMaxRate)},
         {"T", ValueType::optional_number, nullptr, in_range(0, 1e6)},
         {"readout", ValueType::string, "direct", one_of({"direct", "hopping"})},
         {"slope_step", ValueType::number, 1e-5, in_range(1e-12, 1e-1)}});
  } else if (command == "pump") {
    add({{"rabi_up", ValueType::number, gamma, in_range(-detail::kMaxRate, detail::kMaxRate)},
         {"rabi_down", ValueType::number, gamma, in_range(-detail::kMaxRate, detail::kMaxRate)},
         {"detuning", ValueType::number, 0.0, in_range(-detail::kMaxRate, detail::kMaxRate)},
         {"common_detuning", ValueType::number, 0.0, in_range(-detail::kMaxRate, detail::kMaxRate)},
         {"phi0", ValueType::number, 0.0, in_range(-2 * detail::kPi, 2 * detail::kPi)},
         {"gamma", ValueType::number, gamma, in_range(0, detail::kMaxRate)},
         {"branch_up", ValueType::number, 0.5, in_range(0, 1)},
         {"branch_down", ValueType::number, 0.5, in_range(0, 1)},
         {"loss_fraction", ValueType::number, 0.0, in_range(0, 1)},
         {"threshold", ValueType::number, 0.99, in_range(1e-9, 1 - 1e-12)},
         {"duration", ValueType::number, 5e-6, in_range(0, 1e-2)},
         {"horizon", ValueType::number, 20e-6, in_range(1e-12, 1e-2)},
         {"dt_max", ValueType::number, 0.0, in_range(0, 1)},
         {"initial", ValueType::string, "up", one_of({"up", "down", "dark", "bright", "mixed"})}});
  } else if (command == "report") {
    add({{"n_atoms", ValueType::number, 5e6, in_range(2, 1e12)},
         {"protocol", ValueType::string, "esp",
          one_of({"conventional", "esp", "scsp", "scsp-parity-averaged"})},
         {"mu", ValueType::optional_number, nullptr, in_range(0, detail::kPi / 2)},
         {"pmf", ValueType::optional_number, nullptr, in_range(0, 1e12)},
         {"qpn_noise", ValueType::optional_number, nullptr, in_range(0, 1e12)},
         {"excess_noise", ValueType::optional_number, nullptr, in_range(0, 1e15)},
         {"excess_factor", ValueType::number, 50.0, in_range(0, 1e9)}});
  } else if (command == "husimi") {
    add({{"n_atoms", ValueType::integer, 21, in_range(1, 2000)},
         {"protocol", ValueType::string, "scsp", protocols},
         {"mu", ValueType::optional_number, nullptr, in_range(0, detail::kPi)},
         {"parity_target", ValueType::string, "odd", one_of({"odd", "even"})},
         {"dT", ValueType::number, 0.0, in_range(-1e6, 1e6)},
         {"stage", ValueType::integer, 2, in_range(1, 7)},
         {"n_theta", ValueType::integer, 181, in_range(2, 4001)},
         {"n_phi", ValueType::integer, 360, in_range(1, 8000)},
         {"normalization", ValueType::string, "overlap", one_of({"overlap", "measure"})}});
  } else if (command == "mu-sweep") {
    add({{"n_atoms", ValueType::integer, 41, in_range(3, 10000)},
         {"grid", ValueType::string, "0:1.5707963267948966:91", detail::grid_string()},
         {"slope_step", ValueType::number, 1e-5, in_range(1e-12, 1e-1)}});
  } else if (command == "oracle-check") {
    add({{"max_atoms", ValueType::integer, 6, in_range(1, oracle::kMaxAtoms)},
         {"sequences", ValueType::integer, 50, in_range(1, 100000)},
         {"max_steps", ValueType::integer, 8, in_range(0, 64)},
         {"tolerance", ValueType::number, 1e-10, in_range(0, 1)}});
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return keys;
}

/// Merges file config and overrides over the defaults, rejecting unknown
/// keys and values of the wrong type or range.
inline json resolve_config(const std::string& command, const json& file_config,
                           const json& overrides = json::object()) {
  const auto specs = key_specs(command);
  json merged = json::object();
  for (const auto& spec : specs) {
    if (!spec.fallback.is_null()) merged[spec.name] = spec.fallback;
  }
  for (const json* layer : {&file_config, &overrides}) {
    if (layer->is_null()) continue;
    if (!layer->is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : layer->items()) {
      const bool known = std::any_of(specs.begin(), specs.end(),
                                     [&](const KeySpec& s) { return s.name == key; });
      if (!known) throw ConfigError("unknown key '" + key + "' for command " + command);
      if (value.is_null()) {
        merged.erase(key);
      } else {
        merged[key] = value;
      }
    }
  }
  for (const auto& spec : specs) {
    if (!merged.contains(spec.name)) continue;
    const json& v = merged[spec.name];
    bool ok = false;
    switch (spec.type) {
      case ValueType::integer: ok = v.is_number_integer(); break;
      case ValueType::number:
      case ValueType::optional_number: ok = v.is_number(); break;
      case ValueType::string: ok = v.is_string(); break;
      case ValueType::number_or_array:
        ok = v.is_number() ||
             (v.is_array() && !v.empty() &&
              std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); }));
        break;
    }
    if (!ok) throw ConfigError("key '" + spec.name + "' has the wrong type");
    if (spec.check) {
      try {
        spec.check(v);
      } catch (const ConfigError& e) {
        throw ConfigError("key '" + spec.name + "': " + e.what());
      }
    }
  }
  return merged;
}

namespace detail {

inline ProtocolKind protocol_kind(const std::string& name) {
  if (name == "conventional") return ProtocolKind::conventional;
  if (name == "scsp") return ProtocolKind::scsp;
  if (name == "generalized-scsp") return ProtocolKind::generalized_scsp;
  if (name == "esp") return ProtocolKind::esp;
  throw ConfigError("unknown protocol '" + name + "'");
}

inline std::optional<double> optional_number(const json& config, const char* key) {
  if (!config.contains(key)) return std::nullopt;
  return config.at(key).get<double>();
}

inline ProtocolSpec protocol_from(const json& config) {
  const auto kind = protocol_kind(config.at("protocol").get<std::string>());
  const auto mu = optional_number(config, "mu");
  const auto parity = config.at("parity_target").get<std::string>() == "even" ? Parity::even : Parity::odd;
  try {
    return build_spec(kind, config.at("n_atoms").get<int>(), mu, parity);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

/// Output sink: the configured path, or the fallback stream when "out" is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {
    if (!path_.empty()) {
      file_.open(path_, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot open '" + path_ + "' for writing");
    }
  }
  std::ostream& stream() { return path_.empty() ? fallback_ : file_; }
  void close() {
    if (path_.empty()) return;
    file_.close();
    if (!file_) throw IoError("failed writing '" + path_ + "'");
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ofstream file_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Writes <out>.config.json next to a file artifact.
inline void echo_config(const json& config) {
  const auto out = config.at("out").get<std::string>();
  if (!out.empty()) write_text(out + ".config.json", dump(config));
}

}  // namespace detail

struct RunContext {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  unsigned threads = 1;
};

inline int cmd_fringe(const json& config, RunContext& ctx) {
  const auto spec = detail::protocol_from(config);
  std::vector<double> phases;
  if (config.contains("delta")) {
    if (!config.contains("T")) throw ConfigError("'delta' needs 'T'");
    const double period = config.at("T").get<double>();
    const auto& d = config.at("delta");
    if (d.is_array()) {
      for (const auto& x : d) phases.push_back(x.get<double>() * period);
    } else {
      phases.push_back(d.get<double>() * period);
    }
  } else {
    phases = io::parse_grid(config.at("grid").get<std::string>());
  }
  for (std::size_t i = 1; i < phases.size(); ++i) {
    if (!(phases[i] > phases[i - 1])) throw ConfigError("phases must be strictly increasing");
  }
  const SlopeOptions opts{config.at("slope_step").get<double>(), SlopeOptions{}.floor};
  FringeScan scan;
  if (config.at("readout").get<std::string>() == "hopping") {
    if (!is_conventional(spec)) throw ConfigError("hopping readout needs the conventional protocol");
    scan.label = spec.label + "-hopping";
    scan.phases = phases;
    for (double p : phases) scan.stats.push_back(hopping_stats(spec, p, opts));
  } else {
    scan = fringe_scan(spec, phases, ctx.threads, opts);
  }
  detail::Sink sink(config.at("out").get<std::string>(), ctx.out);
  io::write_fringe_csv(sink.stream(), scan);
  sink.close();
  detail::echo_config(config);
  return kOk;
}

inline lambda::LambdaParams lambda_params_from(const json& config) {
  lambda::LambdaParams p;
  p.rabi_up = config.at("rabi_up").get<double>();
  p.rabi_down = config.at("rabi_down").get<double>();
  p.delta = config.at("detuning").get<double>();
  p.big_delta = config.at("common_detuning").get<double>();
  p.phi0 = config.at("phi0").get<double>();
  p.gamma = config.at("gamma").get<double>();
  p.branch_up = config.at("branch_up").get<double>();
  p.branch_down = config.at("branch_down").get<double>();
  p.loss_fraction = config.at("loss_fraction").get<double>();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

inline lambda::LambdaDensity initial_density(const std::string& name, const lambda::LambdaParams& p) {
  if (name == "up") return lambda::LambdaDensity::basis(lambda::kUp);
  if (name == "down") return lambda::LambdaDensity::basis(lambda::kDown);
  if (name == "mixed") {
    lambda::LambdaDensity d;
    d.rho(lambda::kUp, lambda::kUp) = d.rho(lambda::kDown, lambda::kDown) = 0.5;
    return d;
  }
  try {
    const auto db = lambda::dark_bright(p);
    return lambda::LambdaDensity::pure(name == "dark" ? db.dark : db.bright);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

/// Writes the trajectory (always, even if pumping fails) and a JSON summary.
/// With an empty "out" only the summary is printed.
inline int cmd_pump(const json& config, RunContext& ctx) {
  const auto params = lambda_params_from(config);
  const auto rho0 = initial_density(config.at("initial").get<std::string>(), params);
  lambda::IntegratorOptions integrator;
  integrator.dt_max = config.at("dt_max").get<double>();
  const double threshold = config.at("threshold").get<double>();
  const auto out = config.at("out").get<std::string>();

  json summary{{"threshold", threshold},
               {"rule_of_thumb_s", lambda::pumping_time_estimate(std::hypot(params.rabi_up, params.rabi_down) / std::sqrt(2.0), params.gamma)}};
  int code = kOk;
  std::vector<lambda::TrajectoryPoint> traj;
  try {
    traj = lambda::evolve(params, rho0, config.at("duration").get<double>(), integrator);
  } catch (const IntegratorFailure& e) {
    summary["status"] = "integrator-failure";
    summary["error"] = e.what();
    code = kNumericalFailure;
  }
  if (code == kOk) {
    try {
      const auto r = lambda::pumping_time(params, rho0,
                                          {threshold, config.at("horizon").get<double>(), integrator});
      summary["status"] = "ok";
      summary["pumping_time_s"] = r.time;
      summary["dark_population_at_crossing"] = r.dark_population;
    } catch (const NotReachedError& e) {
      summary["status"] = "not-reached";
      summary["error"] = e.what();
      summary["final_dark_population"] = e.final_population();
      code = kNumericalFailure;
    } catch (const IntegratorFailure& e) {
      summary["status"] = "integrator-failure";
      summary["error"] = e.what();
      code = kNumericalFailure;
    }
  }
  if (!traj.empty()) {
    const auto& last = traj.back().density;
    summary["trajectory_end_s"] = traj.back().time;
    summary["trajectory_end_trace"] = last.trace();
    summary["trajectory_end_dark_population"] = lambda::dark_population(last, params);
  }
  if (out.empty()) {
    ctx.out << detail::dump(summary);
  } else {
    detail::Sink sink(out, ctx.out);
    io::write_trajectory_csv(sink.stream(), traj, params);
    sink.close();
    detail::write_text(out + ".summary.json", detail::dump(summary));
    detail::echo_config(config);
  }
  if (code != kOk) ctx.err << "pump: " << summary.value("error", std::string("failed")) << "\n";
  return code;
}

inline json report_json(const analysis::SensitivityReport& r) {
  return {{"pmf", r.pmf},
          {"qpn_noise", r.qpn_noise},
          {"excess_noise", r.excess_noise},
          {"sensitivity", r.sensitivity},
          {"sql_ref", r.sql_ref},
          {"heisenberg_ref", r.heisenberg_ref}};
}

/// Sensitivity under excess noise. Protocol presets fill pmf and qpn_noise:
///   conventional          pmf 1,             qpn sqrt(N)/2
///   esp                   pmf from mu,       qpn sqrt(N)/2
///   scsp                  pmf N,             qpn N/2
///   scsp-parity-averaged  pmf N/2,           qpn N/(2 sqrt 2)
/// Explicit pmf / qpn_noise override the preset; excess_noise defaults to
/// excess_factor * sqrt(N)/2.
inline int cmd_report(const json& config, RunContext& ctx) {
  const double n = config.at("n_atoms").get<double>();
  const auto protocol = config.at("protocol").get<std::string>();
  const double sqn = std::sqrt(n);
  double pmf = 1.0;
  double qpn = 0.5 * sqn;
  if (protocol == "esp") {
    const auto mu = detail::optional_number(config, "mu");
    pmf = analysis::pmf_esp(n, mu ? *mu : analysis::optimal_mu(n));
  } else if (protocol == "scsp") {
    pmf = n;
    qpn = 0.5 * n;
  } else if (protocol == "scsp-parity-averaged") {
    pmf = 0.5 * n;
    qpn = 0.5 * n / std::numbers::sqrt2;
  }
  if (auto v = detail::optional_number(config, "pmf")) pmf = *v;
  if (auto v = detail::optional_number(config, "qpn_noise")) qpn = *v;
  double excess = config.at("excess_factor").get<double>() * 0.5 * sqn;
  if (auto v = detail::optional_number(config, "excess_noise")) excess = *v;
  analysis::SensitivityReport report;
  try {
    report = analysis::make_report(pmf, qpn, excess, n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  json doc = report_json(report);
  doc["n_atoms"] = n;
  doc["protocol"] = protocol;
  doc["sensitivity_over_sql"] = report.sensitivity / report.sql_ref;
  detail::Sink sink(config.at("out").get<std::string>(), ctx.out);
  sink.stream() << detail::dump(doc);
  sink.close();
  detail::echo_config(config);
  return kOk;
}

/// State after `stage - 1` steps of the protocol, starting from all atoms in
/// |up> (stage 1). Stages past the last pulse clamp to the pre-readout state.
inline DickeState staged_state(const ProtocolSpec& spec, int stage, double dT) {
  DickeState state = css(spec.n_atoms, 0.0, 0.0);
  int applied = 0;
  for (const auto& s : spec.steps) {
    if (applied >= stage - 1 || std::holds_alternative<step::Measure>(s)) break;
    state = std::holds_alternative<step::Dark>(s) ? dark_evolve(state, dT) : apply_step(state, s);
    ++applied;
  }
  return state;
}

inline int cmd_husimi(const json& config, RunContext& ctx) {
  const auto spec = detail::protocol_from(config);
  const auto state = staged_state(spec, config.at("stage").get<int>(), config.at("dT").get<double>());
  const auto grid = SphereGrid::uniform(config.at("n_theta").get<std::size_t>(),
                                        config.at("n_phi").get<std::size_t>());
  const auto norm = config.at("normalization").get<std::string>() == "measure"
                        ? QpdNormalization::measure
                        : QpdNormalization::overlap;
  const auto map = husimi_qpd(state, grid, norm);
  detail::Sink sink(config.at("out").get<std::string>(), ctx.out);
  io::write_qpd_csv(sink.stream(), map);
  sink.close();
  detail::echo_config(config);
  return kOk;
}

inline int cmd_mu_sweep(const json& config, RunContext& ctx) {
  const auto grid = io::parse_grid(config.at("grid").get<std::string>());
  const SlopeOptions opts{config.at("slope_step").get<double>(), SlopeOptions{}.floor};
  std::vector<analysis::MuSweepRow> rows;
  try {
    rows = analysis::mu_sweep(config.at("n_atoms").get<int>(), grid, opts);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  detail::Sink sink(config.at("out").get<std::string>(), ctx.out);
  io::write_mu_sweep_csv(sink.stream(), rows);
  sink.close();
  detail::echo_config(config);
  return kOk;
}

inline int cmd_oracle_check(const json& config, RunContext& ctx) {
  const auto summary = oracle::run_check(config.at("max_atoms").get<int>(), config.at("sequences").get<int>(),
                                         config.at("max_steps").get<int>(),
                                         config.at("seed").get<std::uint64_t>(),
                                         config.at("tolerance").get<double>());
  json failures = json::array();
  for (const auto& f : summary.failures) {
    failures.push_back({{"n_atoms", f.n_atoms},
                        {"steps", f.steps},
                        {"max_abs_diff", f.max_abs_diff},
                        {"symmetric_weight", f.symmetric_weight}});
  }
  const json doc{{"pass", summary.pass()},
                 {"seed", summary.seed},
                 {"cases", summary.cases},
                 {"tolerance", summary.tolerance},
                 {"max_abs_diff", summary.max_abs_diff},
                 {"min_symmetric_weight", summary.min_symmetric_weight},
                 {"failures", failures}};
  detail::Sink sink(config.at("out").get<std::string>(), ctx.out);
  sink.stream() << detail::dump(doc);
  sink.close();
  detail::echo_config(config);
  return summary.pass() ? kOk : kOracleMismatch;
}

/// Resolves the config and dispatches; maps failures onto exit codes.
inline int run(const std::string& command, const json& file_config, const json& overrides,
               RunContext& ctx) {
  try {
    const json config = resolve_config(command, file_config, overrides);
    if (command == "fringe") return cmd_fringe(config, ctx);
    if (command == "pump") return cmd_pump(config, ctx);
    if (command == "report") return cmd_report(config, ctx);
    if (command == "husimi") return cmd_husimi(config, ctx);
    if (command == "mu-sweep") return cmd_mu_sweep(config, ctx);
    if (command == "oracle-check") return cmd_oracle_check(config, ctx);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    ctx.err << command << ": config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const json::exception& e) {
    ctx.err << command << ": config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    ctx.err << command << ": " << e.what() << "\n";
    return kIoError;
  } catch (const IntegratorFailure& e) {
    ctx.err << command << ": " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const NotReachedError& e) {
    ctx.err << command << ": " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const ResourceLimitError& e) {
    ctx.err << command << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    ctx.err << command << ": invalid argument: " << e.what() << "\n";
    return kConfigError;
  }
}

inline json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace cptclock::cli
