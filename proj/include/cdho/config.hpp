#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cdho/evolution.hpp"
#include "cdho/grid.hpp"
#include "cdho/nonlinearity.hpp"
#include "cdho/sigma.hpp"
#include "json.hpp"

namespace cdho {

enum class Experiment { Zeta, Propagate, Evolve, Scatter, Classify, LeibnizScan, Acceptance };

const char* to_string(Experiment e) noexcept;
Experiment experiment_from_string(const std::string& s);

struct InitialSpec {
  std::string kind = "gaussian";  // gaussian | file
  double width = 0.0;             // 0: ground-state width of the interior oscillator
  double amplitude = 1.0;
  double momentum = 0.0;
  double center = 0.0;
  double phase = 0.0;
  std::string normalize = "epsilon_prime";  // epsilon_prime | l2 | none
  std::string path;
};

struct RunConfig {
  nlohmann::json resolved;  // defaults merged with the user file and overrides
  Experiment experiment = Experiment::Evolve;
  std::uint64_t seed = 0;
  std::string output;
  SigmaModel model;
  double zeta_tol = 1e-11;
  double zeta_t_max = 0.0;  // 0: derived from the experiment
  NonlinearityParams params;
  Grid grid;
  SolverConfig solver;
  InitialSpec initial;

  const nlohmann::json& section(const char* name) const { return resolved.at(name); }
};

nlohmann::json default_config();
nlohmann::json load_config_file(const std::filesystem::path& path);

// "a.b.c=value"; value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Merges over the defaults, rejects unknown keys and validates every field before any compute.
RunConfig resolve_config(const nlohmann::json& user);

// Initial data from config.initial on config.grid.
InitialState make_initial(const RunConfig& cfg);

// Width of the Gaussian ground state of the interior oscillator (1 when σ(0) ≤ 0).
double ground_state_width(const SigmaModel& model);

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace cdho
