// Command-line front end: configuration-driven experiments plus the
// invariant verification suite.

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "magscat/runner.hpp"

namespace {

using magscat::runner::ScenarioConfig;

struct CommonArgs {
  std::string config;
  std::string out;
  std::string experiment;
  int workers = -1;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "JSON scenario config (MAGSCAT_CONFIG)");
  cmd->add_option("--out", args.out, "output directory (MAGSCAT_OUT)");
  cmd->add_option("--workers", args.workers, "worker threads, 0 = all cores (MAGSCAT_WORKERS)");
  cmd->add_option("--seed", args.seed, "RNG seed for randomized suites (MAGSCAT_SEED)");
  cmd->add_option("--experiment", args.experiment, "experiment name (MAGSCAT_EXPERIMENT)");
}

void apply_env(CommonArgs& args) {
  auto env = [](const char* name) -> const char* { return std::getenv(name); };
  if (args.config.empty())
    if (const char* v = env("MAGSCAT_CONFIG")) args.config = v;
  if (args.out.empty())
    if (const char* v = env("MAGSCAT_OUT")) args.out = v;
  if (args.experiment.empty())
    if (const char* v = env("MAGSCAT_EXPERIMENT")) args.experiment = v;
  if (args.workers < 0)
    if (const char* v = env("MAGSCAT_WORKERS")) args.workers = std::atoi(v);
  if (args.seed < 0)
    if (const char* v = env("MAGSCAT_SEED")) args.seed = std::atoll(v);
}

int run_group(const CommonArgs& raw, const std::vector<std::string>& allowed) {
  CommonArgs args = raw;
  apply_env(args);
  ScenarioConfig cfg;
  if (!args.config.empty()) {
    cfg = magscat::runner::load_config(args.config);
    if (!args.experiment.empty()) cfg.experiment = args.experiment;
  } else {
    const std::string name = args.experiment.empty() ? allowed.front() : args.experiment;
    cfg = magscat::runner::default_config(name);
  }
  bool ok = false;
  for (const auto& a : allowed) ok = ok || a == cfg.experiment;
  if (!ok) {
    std::fprintf(stderr, "experiment '%s' does not belong to this subcommand; expected one of:",
                 cfg.experiment.c_str());
    for (const auto& a : allowed) std::fprintf(stderr, " %s", a.c_str());
    std::fprintf(stderr, "\n");
    return 2;
  }
  if (!args.out.empty()) cfg.output_dir = args.out;
  if (args.workers >= 0) cfg.workers = args.workers;
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);

  const auto outcome = magscat::runner::run_experiment(cfg);
  for (const auto& c : outcome.criteria)
    std::printf("[%s] %-28s value=%.6g threshold=%.6g  %s\n", c.pass ? "PASS" : "FAIL",
                c.id.c_str(), c.value, c.threshold, c.description.c_str());
  std::printf("%s: %s (report: %s/report.json)\n", outcome.experiment.c_str(),
              outcome.pass ? "PASS" : "FAIL", cfg.output_dir.c_str());
  return outcome.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magscat: nonlinear magnetic Schrodinger scattering laboratory"};
  app.require_subcommand(1);

  const std::map<std::string, std::pair<std::string, std::vector<std::string>>> groups{
      {"simulate",
       {"time evolution experiments",
        {"conservation", "splitting_order", "plane_wave_exact"}}},
      {"scatter",
       {"forward scattering experiments",
        {"free_identity", "duhamel_fixed_point", "norm_equivalence"}}},
      {"smallamp", {"small-amplitude pairing sweep", {"smallamp_sweep"}}},
      {"probe", {"high-velocity probing", {"highvel_remainder"}}},
      {"reconstruct", {"tomography experiments", {"fbp_oracle", "recon_a", "recon_v"}}},
  };

  std::map<std::string, CommonArgs> args;
  for (const auto& [name, info] : groups) {
    auto* cmd = app.add_subcommand(name, info.first);
    add_common(cmd, args[name]);
  }

  auto* vcmd = app.add_subcommand("verify", "run the module invariant suite");
  CommonArgs vargs;
  std::vector<std::string> selection;
  bool inject_fault = false;
  add_common(vcmd, vargs);
  vcmd->add_option("--check", selection, "run only the named checks");
  vcmd->add_flag("--inject-fault", inject_fault,
                 "corrupt a propagator sign to demonstrate failure detection");

  CLI11_PARSE(app, argc, argv);

  try {
    if (vcmd->parsed()) {
      apply_env(vargs);
      magscat::runner::VerifyOptions opt;
      opt.selection = selection;
      opt.seed = vargs.seed >= 0 ? static_cast<std::uint64_t>(vargs.seed) : 1;
      opt.inject_fault = inject_fault;
      const auto results = magscat::runner::verify(opt);
      bool all = true;
      std::printf("%-26s %-6s %-14s %s\n", "check", "status", "value", "detail");
      for (const auto& r : results) {
        std::printf("%-26s %-6s %-14.6g %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.value,
                    r.detail.c_str());
        all = all && r.pass;
      }
      return all ? 0 : 1;
    }
    for (const auto& [name, info] : groups)
      if (app.get_subcommand(name)->parsed()) return run_group(args[name], info.second);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
