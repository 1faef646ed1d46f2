#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdho/config.hpp"
#include "cdho/error.hpp"
#include "cdho/run.hpp"
#include "cdho/sweep.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  int jobs = 1;
};

nlohmann::json user_config(const Common& c, const std::string& experiment) {
  nlohmann::json j = c.config.empty() ? nlohmann::json::object() : cdho::load_config_file(c.config);
  if (!experiment.empty()) j["experiment"] = experiment;
  for (const auto& o : c.overrides) cdho::apply_override(j, o);
  return j;
}

// "1e-3,5e-4" -> [0.001, 0.0005]; entries that are not JSON are kept as strings
std::vector<nlohmann::json> parse_values(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(item));
    } catch (const nlohmann::json::parse_error&) {
      out.push_back(item);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critically decaying harmonic oscillator NLS toolkit"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", common.out, "output directory (default: config.output)");
  app.add_option("--override", common.overrides, "dotted key=value, repeatable");
  app.add_option("--jobs", common.jobs, "parallel jobs for sweep")->check(CLI::PositiveNumber);

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"zeta", "fundamental solutions, Wronskian and matching report"},
      {"propagate", "linear MDFM propagation of the initial data"},
      {"evolve", "nonlinear evolution with diagnostics"},
      {"scatter", "evolution plus scattering-profile extraction"},
      {"classify", "short/long-range threshold verdicts"},
      {"leibniz", "fractional Leibniz ratio over the seeded corpus"},
      {"acceptance", "acceptance suite"},
  };
  for (const auto& [name, help] : experiments) app.add_subcommand(name, help)->fallthrough();

  auto* sw = app.add_subcommand("sweep", "run one job per value of a config field")->fallthrough();
  std::string axis, values;
  sw->add_option("--axis", axis, "dotted config path, e.g. solver.epsilon_prime")->required();
  sw->add_option("--values", values, "comma-separated values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "sweep") {
      const nlohmann::json base = user_config(common, "");
      const cdho::RunConfig probe = cdho::resolve_config(base);
      const std::string out = common.out.empty() ? probe.output : common.out;
      const cdho::SweepReport r = cdho::sweep(base, axis, parse_values(values), common.jobs, out);
      std::cout << r.succeeded << " job(s) succeeded, " << r.failures.size() << " failed\n";
      for (const auto& f : r.failures) std::cerr << "failed " << f.value.dump() << ": " << f.error << '\n';
      return r.failures.empty() ? 0 : 1;
    }
    const cdho::RunConfig cfg = cdho::resolve_config(user_config(common, cmd));
    const std::string out = common.out.empty() ? cfg.output : common.out;
    const cdho::RunReport r = cdho::run(cfg, out);
    std::cout << r.summary.dump(2) << '\n';
    return r.status;
  } catch (const cdho::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
