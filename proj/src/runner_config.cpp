#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "magscat/runner.hpp"
#include "magscat/velocity_probe.hpp"

namespace magscat::runner {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "free_identity",  "conservation",   "splitting_order", "plane_wave_exact",
      "duhamel_fixed_point", "norm_equivalence", "smallamp_sweep",  "highvel_remainder",
      "fbp_oracle",     "recon_a",        "recon_v"};
  return names;
}

namespace {

void check_keys(const nlohmann::json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) throw std::invalid_argument("config." + path + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key))
      throw std::invalid_argument("config." + path + ": unknown key '" + key + "'");
}

std::array<double, 2> parse_vec2(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.size() > 2 || j.empty())
    throw std::invalid_argument("config." + path + ": expected [x] or [x, y]");
  std::array<double, 2> v{0.0, 0.0};
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

std::vector<BumpConfig> parse_bumps(const nlohmann::json& j, const std::string& path,
                                    bool with_component) {
  std::vector<BumpConfig> out;
  if (!j.is_array()) throw std::invalid_argument("config." + path + ": expected an array");
  std::size_t i = 0;
  for (const auto& bj : j) {
    const std::string bp = path + "[" + std::to_string(i++) + "]";
    std::set<std::string> allowed{"center", "amplitude", "widths"};
    if (with_component) allowed.insert("component");
    check_keys(bj, bp, allowed);
    BumpConfig b;
    if (with_component && bj.contains("component")) b.component = bj["component"].get<int>();
    if (b.component < 0 || b.component > 1)
      throw std::invalid_argument("config." + bp + ".component: must be 0 or 1");
    if (bj.contains("center")) b.center = parse_vec2(bj["center"], bp + ".center");
    if (!bj.contains("amplitude"))
      throw std::invalid_argument("config." + bp + ": missing 'amplitude'");
    b.amplitude = bj["amplitude"].get<double>();
    if (bj.contains("widths")) {
      b.widths = parse_vec2(bj["widths"], bp + ".widths");
      if (bj["widths"].size() == 1) b.widths[1] = b.widths[0];
    }
    out.push_back(b);
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config(const nlohmann::json& j) {
  check_keys(j, "", {"experiment", "grid", "potential", "dynamics", "probes", "initial_state",
                     "output_dir", "seed", "workers"});
  if (!j.contains("experiment"))
    throw std::invalid_argument("config: missing 'experiment' selector");
  const std::string name = j["experiment"].get<std::string>();
  const auto& known = experiment_names();
  if (std::find(known.begin(), known.end(), name) == known.end())
    throw std::invalid_argument("config.experiment: unknown experiment '" + name + "'");
  if (!j.contains("grid")) throw std::invalid_argument("config: missing 'grid' block");

  ScenarioConfig cfg = default_config(name);

  {
    const auto& gj = j["grid"];
    check_keys(gj, "grid", {"n", "N", "L"});
    if (gj.contains("n")) cfg.grid.n = gj["n"].get<int>();
    if (gj.contains("N")) cfg.grid.N = gj["N"].get<int>();
    if (gj.contains("L")) cfg.grid.L = gj["L"].get<double>();
  }
  if (j.contains("potential")) {
    const auto& pj = j["potential"];
    check_keys(pj, "potential", {"gamma0", "a_bumps", "v_bumps", "gauge_chi_bumps"});
    if (pj.contains("gamma0")) cfg.potential.gamma0 = pj["gamma0"].get<double>();
    if (pj.contains("a_bumps"))
      cfg.potential.a_bumps = parse_bumps(pj["a_bumps"], "potential.a_bumps", true);
    if (pj.contains("v_bumps"))
      cfg.potential.v_bumps = parse_bumps(pj["v_bumps"], "potential.v_bumps", false);
    if (pj.contains("gauge_chi_bumps"))
      cfg.potential.gauge_chi_bumps =
          parse_bumps(pj["gauge_chi_bumps"], "potential.gauge_chi_bumps", false);
  }
  if (j.contains("dynamics")) {
    const auto& dj = j["dynamics"];
    check_keys(dj, "dynamics", {"p", "dt", "T", "T_scat"});
    if (dj.contains("p")) cfg.dynamics.p = dj["p"].get<double>();
    if (dj.contains("dt")) cfg.dynamics.dt = dj["dt"].get<double>();
    if (dj.contains("T")) cfg.dynamics.T = dj["T"].get<double>();
    if (dj.contains("T_scat")) cfg.dynamics.t_scat = dj["T_scat"].get<double>();
  }
  if (j.contains("probes")) {
    const auto& pj = j["probes"];
    check_keys(pj, "probes",
               {"angles", "offsets", "offset_range", "xi_ladder", "eps_ladder", "sigma",
                "stability_policy"});
    if (pj.contains("angles")) cfg.probes.angles = pj["angles"].get<int>();
    if (pj.contains("offsets")) cfg.probes.offsets = pj["offsets"].get<int>();
    if (pj.contains("offset_range")) cfg.probes.offset_range = pj["offset_range"].get<double>();
    if (pj.contains("xi_ladder")) cfg.probes.xi_ladder = pj["xi_ladder"].get<std::vector<double>>();
    if (pj.contains("eps_ladder"))
      cfg.probes.eps_ladder = pj["eps_ladder"].get<std::vector<double>>();
    if (pj.contains("sigma")) cfg.probes.sigma = pj["sigma"].get<double>();
    if (pj.contains("stability_policy")) {
      cfg.probes.stability_policy = pj["stability_policy"].get<std::string>();
      if (cfg.probes.stability_policy != "per_angle" && cfg.probes.stability_policy != "per_probe")
        throw std::invalid_argument("config.probes.stability_policy: 'per_angle' or 'per_probe'");
    }
  }
  if (j.contains("initial_state")) {
    const auto& sj = j["initial_state"];
    check_keys(sj, "initial_state", {"sigma", "center", "k0", "amplitude"});
    if (sj.contains("sigma")) cfg.initial_state.sigma = sj["sigma"].get<double>();
    if (sj.contains("center")) cfg.initial_state.center = parse_vec2(sj["center"], "initial_state.center");
    if (sj.contains("k0")) cfg.initial_state.k0 = parse_vec2(sj["k0"], "initial_state.k0");
    if (sj.contains("amplitude")) cfg.initial_state.amplitude = sj["amplitude"].get<double>();
  }
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();

  // Re-validate module preconditions that the config can break.
  (void)make_grid(cfg.grid.n, cfg.grid.N, cfg.grid.L);
  if (!(cfg.dynamics.p > 1.0)) throw std::invalid_argument("config.dynamics.p: requires p > 1");
  if (!(cfg.dynamics.dt > 0.0)) throw std::invalid_argument("config.dynamics.dt: must be positive");
  for (std::size_t i = 1; i < cfg.probes.eps_ladder.size(); ++i)
    if (!(cfg.probes.eps_ladder[i] < cfg.probes.eps_ladder[i - 1]))
      throw std::invalid_argument("config.probes.eps_ladder: must be strictly decreasing");
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot read config: " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: JSON parse error: " + std::string(e.what()));
  }
  return parse_config(j);
}

PotentialPtr build_scenario_potential(const ScenarioConfig& cfg, GridPtr grid) {
  if (!cfg.potential.gauge_chi_bumps.empty()) {
    // A = grad(chi): sampled analytically from the chi descriptor.
    std::vector<GaussianBump> chi;
    for (const auto& b : cfg.potential.gauge_chi_bumps)
      chi.push_back(GaussianBump{b.center, b.amplitude, b.widths});
    std::array<std::vector<double>, 2> a;
    for (int d = 0; d < grid->dim(); ++d) {
      a[static_cast<std::size_t>(d)].assign(grid->size(), 0.0);
      for (std::size_t i = 0; i < grid->size(); ++i)
        for (const auto& b : chi)
          a[static_cast<std::size_t>(d)][i] += b.eval_derivative(grid->point(i), grid->dim(), d);
    }
    return PotentialSet::from_samples(std::move(grid), std::move(a), {});
  }
  if (cfg.potential.a_bumps.empty() && cfg.potential.v_bumps.empty()) return nullptr;
  PotentialDescriptor desc;
  for (const auto& b : cfg.potential.a_bumps)
    desc.a[static_cast<std::size_t>(b.component)].push_back(
        GaussianBump{b.center, b.amplitude, b.widths});
  for (const auto& b : cfg.potential.v_bumps)
    desc.v.push_back(GaussianBump{b.center, b.amplitude, b.widths});
  return build_potentials(desc, std::move(grid), cfg.potential.gamma0);
}

Field make_initial_state(const ScenarioConfig& cfg, GridPtr grid) {
  Field f = gaussian_packet(grid, cfg.initial_state.center, cfg.initial_state.sigma);
  const auto& k0 = cfg.initial_state.k0;
  if (k0[0] != 0.0 || (grid->dim() == 2 && k0[1] != 0.0))
    f = boost(f, k0, 1.0, cfg.initial_state.sigma);
  return cplx{cfg.initial_state.amplitude, 0.0} * f;
}

}  // namespace magscat::runner
