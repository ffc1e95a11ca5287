#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "magscat/potentials.hpp"

namespace magscat::runner {

struct GridConfig {
  int n = 1;
  int N = 256;
  double L = 20.0;
};

struct BumpConfig {
  int component = 0;  // 0/1 -> A component; ignored for V bumps
  std::array<double, 2> center{0.0, 0.0};
  double amplitude = 0.0;
  std::array<double, 2> widths{1.0, 1.0};
};

struct PotentialConfig {
  double gamma0 = 1.0;
  std::vector<BumpConfig> a_bumps;
  std::vector<BumpConfig> v_bumps;
  // When set, A = grad(chi) with chi the listed bumps (pure gauge field,
  // sampled analytically; bypasses the descriptor's closed-form paths).
  std::vector<BumpConfig> gauge_chi_bumps;
};

struct DynamicsConfig {
  double p = 3.0;
  double dt = 1e-3;
  double T = 1.0;
  double t_scat = 1.0;
};

struct ProbesConfig {
  int angles = 18;
  int offsets = 65;
  double offset_range = 6.0;
  std::vector<double> xi_ladder{8.0, 16.0, 32.0};
  std::vector<double> eps_ladder{0.5, 0.25, 0.125, 0.0625, 0.03125};
  double sigma = 0.5;
  std::string stability_policy = "per_angle";  // or "per_probe"
};

struct StateConfig {
  double sigma = 1.0;
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> k0{0.0, 0.0};
  double amplitude = 1.0;
};

struct ScenarioConfig {
  std::string experiment;
  GridConfig grid;
  PotentialConfig potential;
  DynamicsConfig dynamics;
  ProbesConfig probes;
  StateConfig initial_state;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
};

const std::vector<std::string>& experiment_names();

// Pinned per-experiment defaults; the acceptance suite runs exactly these.
ScenarioConfig default_config(const std::string& experiment);

// Reads a JSON config: defaults for its "experiment" overlaid with the file
// values. Unknown keys are rejected with their field path; the "grid" block
// is mandatory.
ScenarioConfig load_config(const std::filesystem::path& file);
ScenarioConfig parse_config(const nlohmann::json& j);

struct CriterionResult {
  std::string id;
  std::string description;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ExperimentOutcome {
  std::string experiment;
  nlohmann::json report;  // schema_version, metrics, criteria, pass
  std::vector<CriterionResult> criteria;
  bool pass = true;
};

// Runs one experiment, writes artifacts + report.json under output_dir.
ExperimentOutcome run_experiment(const ScenarioConfig& cfg);

// Shared constructors used by experiments and tests.
PotentialPtr build_scenario_potential(const ScenarioConfig& cfg, GridPtr grid);
Field make_initial_state(const ScenarioConfig& cfg, GridPtr grid);

struct VerifyOptions {
  std::vector<std::string> selection;  // empty = all
  std::uint64_t seed = 1;
  bool inject_fault = false;  // flips the div-A sign inside the unitarity check
};

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

// Module invariant suite at small scale (n=1 N=256 and n=2 N=128).
// Throws std::invalid_argument when `selection` names no known check.
std::vector<VerifyCheck> verify(const VerifyOptions& opt);

}  // namespace magscat::runner
