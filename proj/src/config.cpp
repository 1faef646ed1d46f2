#include "cdho/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cdho/error.hpp"
#include "cdho/field_io.hpp"
#include "cdho/norms.hpp"

namespace cdho {

namespace {

using nlohmann::json;

// Keys whose values are free-form (not checked against the defaults).
bool free_form(const std::string& path) { return path == "acceptance.only"; }

void check_keys(const json& user, const json& defaults, const std::string& prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!defaults.contains(it.key())) throw Error(ErrorKind::Config, "unknown field '" + path + "'");
    const json& d = defaults.at(it.key());
    if (d.is_object() && !free_form(path)) {
      if (!it.value().is_object()) throw Error(ErrorKind::Config, "field '" + path + "' must be a section");
      check_keys(it.value(), d, path);
    }
  }
}

const json& at_path(const json& j, const std::string& path) {
  const json* cur = &j;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) cur = &cur->at(part);
  return *cur;
}

double num(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_number()) throw Error(ErrorKind::Config, "field '" + path + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorKind::Config, "field '" + path + "' must be finite");
  return x;
}

int integer(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_number_integer()) throw Error(ErrorKind::Config, "field '" + path + "' must be an integer");
  return v.get<int>();
}

std::string str(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_string()) throw Error(ErrorKind::Config, "field '" + path + "' must be a string");
  return v.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_boolean()) throw Error(ErrorKind::Config, "field '" + path + "' must be true or false");
  return v.get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  const json& v = at_path(j, path);
  if (!v.is_array()) throw Error(ErrorKind::Config, "field '" + path + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw Error(ErrorKind::Config, "field '" + path + "' must be a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// Rethrows module validation errors with the config section named.
template <class F>
auto in_section(const std::string& section, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    throw Error(ErrorKind::Config, "section '" + section + "': " + e.what());
  }
}

}  // namespace

const char* to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::Zeta: return "zeta";
    case Experiment::Propagate: return "propagate";
    case Experiment::Evolve: return "evolve";
    case Experiment::Scatter: return "scatter";
    case Experiment::Classify: return "classify";
    case Experiment::LeibnizScan: return "leibniz";
    case Experiment::Acceptance: return "acceptance";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& s) {
  for (Experiment e : {Experiment::Zeta, Experiment::Propagate, Experiment::Evolve, Experiment::Scatter,
                       Experiment::Classify, Experiment::LeibnizScan, Experiment::Acceptance})
    if (s == to_string(e)) return e;
  throw Error(ErrorKind::Config, "field 'experiment': unknown experiment \"" + s + "\"");
}

json default_config() {
  return json::parse(R"({
    "experiment": "evolve",
    "seed": 1729,
    "output": "out",
    "model": {"kind": "section4", "r0": 1.0, "alpha": 0.0, "alpha_sq": 1.0, "smooth_coeffs": []},
    "fundamental": {"tol": 1e-11, "t_max": 0.0},
    "params": {"mu_L": 1.0, "mu_S": 0.0, "theta": 0.0, "R": 0.0, "delta0": 0.01, "n": 1},
    "grid": {"N": 2048, "L": 32.0},
    "solver": {
      "scheme": "hybrid", "dt0": 0.01, "t_start": 0.0, "t_max": 10000.0, "t_ref": 10.0,
      "t_first": 1.0, "snapshots_per_decade": 40, "extra_snapshots": [],
      "epsilon_prime": 0.001, "gamma": 1.0, "t_switch": 0.0, "monitor_every": 50,
      "escape_limit": 1e-6, "tail_limit": 1e-8, "blowup_factor": 10.0, "write_snapshots": false
    },
    "initial": {"kind": "gaussian", "width": 0.0, "amplitude": 1.0, "momentum": 0.0, "center": 0.0,
                "phase": 0.0, "normalize": "epsilon_prime", "path": ""},
    "zeta": {"t_max": 1000.0, "points": 4001},
    "propagate": {"times": [0.5, 1.0, 2.0, 4.0], "write_fields": true},
    "scatter": {"phase_mu_convention": "single", "phase_model": "loglog", "alpha": 0.2,
                "gamma_prime": 0.75, "mask_rel": 1e-3},
    "classify": {"theta3": [4.0, 3.6, 3.0], "decay_log_exponent": 0.0, "s0": 2.718281828459045,
                 "s_max": 1e300, "bound": 1e6, "include_FL": true, "include_FS": true},
    "leibniz": {"corpus": 50, "gammas": [0.75, 1.5, 2.5], "N": 256, "L": 16.0, "part": "L",
                "refine": true},
    "acceptance": {"only": []}
  })");
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, "config " + path.string() + ": " + e.what());
  }
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorKind::Config, "override \"" + assignment + "\" is not key=value");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* cur = &j;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    cur = &(*cur)[parts[i]];
    if (cur->is_null()) *cur = json::object();
    if (!cur->is_object()) throw Error(ErrorKind::Config, "override path '" + key + "' crosses a value");
  }
  (*cur)[parts.back()] = value;
}

RunConfig resolve_config(const json& user) {
  if (!user.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
  json d = default_config();
  check_keys(user, d, "");
  d.merge_patch(user);
  RunConfig c;
  c.resolved = d;

  c.experiment = experiment_from_string(str(d, "experiment"));
  if (!d.at("seed").is_number_unsigned() && !d.at("seed").is_number_integer())
    throw Error(ErrorKind::Config, "field 'seed' must be a nonnegative integer");
  c.seed = d.at("seed").get<std::uint64_t>();
  c.output = str(d, "output");

  c.model = in_section("model", [&] {
    const std::string kind = str(d, "model.kind");
    const double r0 = num(d, "model.r0");
    SigmaModel m;
    switch (sigma_kind_from_string(kind)) {
      case SigmaKind::Zero: m = SigmaModel::zero(r0); break;
      case SigmaKind::Constant: m = SigmaModel::constant(num(d, "model.alpha_sq"), r0); break;
      case SigmaKind::CanonicalCritical: {
        const auto cs = numbers(d, "model.smooth_coeffs");
        m = SigmaModel::canonical(r0, Eigen::Map<const Eigen::VectorXd>(cs.data(), cs.size()));
        break;
      }
      case SigmaKind::Section4: {
        const double a = num(d, "model.alpha");
        m = a == 0.0 ? SigmaModel::matched_section4(r0) : SigmaModel::section4(a, r0);
        break;
      }
    }
    m.validate();
    return m;
  });

  c.zeta_tol = num(d, "fundamental.tol");
  c.zeta_t_max = num(d, "fundamental.t_max");
  if (!(c.zeta_tol > 0)) throw Error(ErrorKind::Config, "field 'fundamental.tol' must be positive");
  if (c.zeta_t_max < 0) throw Error(ErrorKind::Config, "field 'fundamental.t_max' must be >= 0");

  c.params = in_section("params", [&] {
    NonlinearityParams p;
    p.mu_L = num(d, "params.mu_L");
    p.mu_S = num(d, "params.mu_S");
    p.theta = num(d, "params.theta");
    p.delta0 = num(d, "params.delta0");
    p.n = integer(d, "params.n");
    const double R = num(d, "params.R");
    if (!(p.delta0 > 0 && p.delta0 < 1)) throw Error(ErrorKind::Config, "field 'params.delta0' must lie in (0, 1)");
    p.R = R == 0.0 ? min_admissible_R(p.delta0) * (1.0 + 1e-6) : R;
    p.validate();
    return p;
  });

  c.grid = in_section("grid", [&] { return Grid(c.params.n, integer(d, "grid.N"), num(d, "grid.L")); });

  c.solver = in_section("solver", [&] {
    SolverConfig s;
    const std::string scheme = str(d, "solver.scheme");
    if (scheme == "position")
      s.scheme = Scheme::Position;
    else if (scheme == "hybrid")
      s.scheme = Scheme::Hybrid;
    else
      throw Error(ErrorKind::Config, "field 'solver.scheme' must be \"position\" or \"hybrid\"");
    s.dt0 = num(d, "solver.dt0");
    s.t_start = num(d, "solver.t_start");
    s.t_max = num(d, "solver.t_max");
    s.t_ref = num(d, "solver.t_ref");
    s.t_first = num(d, "solver.t_first");
    s.snapshots_per_decade = integer(d, "solver.snapshots_per_decade");
    s.extra_snapshots = numbers(d, "solver.extra_snapshots");
    s.epsilon_prime = num(d, "solver.epsilon_prime");
    s.gamma = num(d, "solver.gamma");
    s.t_switch = num(d, "solver.t_switch");
    s.monitor_every = integer(d, "solver.monitor_every");
    s.escape_limit = num(d, "solver.escape_limit");
    s.tail_limit = num(d, "solver.tail_limit");
    s.blowup_factor = num(d, "solver.blowup_factor");
    boolean(d, "solver.write_snapshots");
    s.validate(c.params.n);
    return s;
  });

  c.initial.kind = str(d, "initial.kind");
  c.initial.width = num(d, "initial.width");
  c.initial.amplitude = num(d, "initial.amplitude");
  c.initial.momentum = num(d, "initial.momentum");
  c.initial.center = num(d, "initial.center");
  c.initial.phase = num(d, "initial.phase");
  c.initial.normalize = str(d, "initial.normalize");
  c.initial.path = str(d, "initial.path");
  if (c.initial.kind != "gaussian" && c.initial.kind != "file")
    throw Error(ErrorKind::Config, "field 'initial.kind' must be \"gaussian\" or \"file\"");
  if (c.initial.kind == "file" && c.initial.path.empty())
    throw Error(ErrorKind::Config, "field 'initial.path' is required when initial.kind = \"file\"");
  if (c.initial.width < 0) throw Error(ErrorKind::Config, "field 'initial.width' must be >= 0");
  if (c.initial.normalize != "epsilon_prime" && c.initial.normalize != "l2" && c.initial.normalize != "none")
    throw Error(ErrorKind::Config, "field 'initial.normalize' must be epsilon_prime, l2 or none");
  if (c.initial.normalize == "epsilon_prime" && !(c.solver.epsilon_prime > 0) && c.initial.kind == "gaussian")
    throw Error(ErrorKind::Config, "field 'solver.epsilon_prime' must be positive to normalize initial data by it");

  // experiment sections
  if (!(num(d, "zeta.t_max") > 0)) throw Error(ErrorKind::Config, "field 'zeta.t_max' must be positive");
  if (integer(d, "zeta.points") < 2) throw Error(ErrorKind::Config, "field 'zeta.points' must be >= 2");
  for (double t : numbers(d, "propagate.times"))
    if (t == 0.0) throw Error(ErrorKind::Config, "field 'propagate.times' must not contain 0");
  boolean(d, "propagate.write_fields");
  const std::string conv = str(d, "scatter.phase_mu_convention");
  if (conv != "single" && conv != "double")
    throw Error(ErrorKind::Config, "field 'scatter.phase_mu_convention' must be \"single\" or \"double\"");
  const std::string pm = str(d, "scatter.phase_model");
  if (pm != "loglog" && pm != "w_integral")
    throw Error(ErrorKind::Config, "field 'scatter.phase_model' must be \"loglog\" or \"w_integral\"");
  num(d, "scatter.alpha");
  num(d, "scatter.gamma_prime");
  if (!(num(d, "scatter.mask_rel") > 0)) throw Error(ErrorKind::Config, "field 'scatter.mask_rel' must be positive");
  numbers(d, "classify.theta3");
  num(d, "classify.decay_log_exponent");
  if (!(num(d, "classify.s0") > 1)) throw Error(ErrorKind::Config, "field 'classify.s0' must exceed 1");
  if (!(num(d, "classify.s_max") > num(d, "classify.s0")))
    throw Error(ErrorKind::Config, "field 'classify.s_max' must exceed classify.s0");
  if (!(num(d, "classify.bound") > 0)) throw Error(ErrorKind::Config, "field 'classify.bound' must be positive");
  boolean(d, "classify.include_FL");
  boolean(d, "classify.include_FS");
  if (integer(d, "leibniz.corpus") < 1) throw Error(ErrorKind::Config, "field 'leibniz.corpus' must be >= 1");
  for (double g : numbers(d, "leibniz.gammas"))
    if (!(g > 0)) throw Error(ErrorKind::Config, "field 'leibniz.gammas' must be positive");
  in_section("leibniz", [&] { return Grid(c.params.n, integer(d, "leibniz.N"), num(d, "leibniz.L")); });
  const std::string part = str(d, "leibniz.part");
  if (part != "L" && part != "S") throw Error(ErrorKind::Config, "field 'leibniz.part' must be \"L\" or \"S\"");
  boolean(d, "leibniz.refine");
  return c;
}

double ground_state_width(const SigmaModel& model) {
  const double s0 = eval_sigma(model, 0.0);
  return s0 > 0 ? std::pow(s0, -0.25) : 1.0;
}

InitialState make_initial(const RunConfig& cfg) {
  const InitialSpec& in = cfg.initial;
  if (in.kind == "file") {
    const FieldFile ff = read_field(in.path);
    if (!(ff.field.grid == cfg.grid))
      throw Error(ErrorKind::Config, "initial file grid differs from the configured grid");
    const bool profile = ff.header.value("state", std::string("solution")) == "profile";
    return InitialState{ff.time, profile ? StateKind::ProfileDelta : StateKind::Solution, ff.field};
  }
  const double w = in.width > 0 ? in.width : ground_state_width(cfg.model);
  Field u = Field::sample(cfg.grid, Space::Position, [&](const Eigen::VectorXd& x) {
    double r2 = 0.0, kx = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      r2 += (x(i) - in.center) * (x(i) - in.center);
      kx += in.momentum * x(i);
    }
    return std::polar(in.amplitude * std::exp(-r2 / (2 * w * w)), kx + in.phase);
  });
  if (in.normalize == "l2") {
    u.values /= l2_norm(u);
  } else if (in.normalize == "epsilon_prime") {
    const double g = cfg.solver.gamma;
    const double size = sobolev_norm(u, g, SobolevSide::FrequencyWeighted) +
                        sobolev_norm(u, g, SobolevSide::PositionWeighted);
    u.values *= cfg.solver.epsilon_prime * (1.0 - 1e-9) / size;
  }
  return InitialState{cfg.solver.t_start, StateKind::Solution, u};
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace cdho
