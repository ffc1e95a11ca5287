#include <doctest.h>

#include <cmath>

#include "magscat/scattering.hpp"
#include "magscat/velocity_probe.hpp"

using namespace magscat;

namespace {

// Shared 1-d scattering geometry: packet at speed 12 crossing a weak bump.
struct Setup {
  GridPtr grid = make_grid(1, 512, 40.0);
  PotentialPtr pot;
  Field phi{};

  explicit Setup(double amp = 0.15) {
    PotentialDescriptor d;
    if (amp != 0.0) d.a[0].push_back({{0.0, 0.0}, amp, {1.2, 1.2}});
    pot = build_potentials(d, grid, 1.0);
    phi = boost(gaussian_packet(grid, {0.0, 0.0}, 1.0), {6.0, 0.0}, 1.0, 1.0);
  }

  ScatterSpec spec(ScatterMode mode = ScatterMode::linear) const {
    ScatterSpec s;
    s.t_scat = 2.2;
    s.evo.dt = 2e-3;
    s.evo.p = 3.0;
    s.mode = mode;
    return s;
  }
};

}  // namespace

TEST_CASE("wave_operator: identity when A = V = 0; round trip recovers phi") {
  Setup su(0.0);
  const HamiltonianOp ham(su.grid, su.pot);
  const auto spec = su.spec();
  const auto wm = wave_operator(su.phi, -1, ham, spec);
  CHECK(l2_norm(wm.phi_plus - su.phi) / l2_norm(su.phi) < 1e-10);
  CHECK(wm.diag.t_stable);
  const Field back = wave_operator_adjoint(wm.phi_plus, +1, ham, spec);
  CHECK(l2_norm(back - su.phi) / l2_norm(su.phi) < 1e-10);
}

TEST_CASE("wave_operator: isometric on wave packets with a Gaussian bump") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  for (const int sign : {-1, +1}) {
    const auto w = wave_operator(su.phi, sign, ham, su.spec());
    CHECK(std::abs(l2_norm(w.phi_plus) / l2_norm(su.phi) - 1.0) < 1e-6);
    CHECK(w.diag.t_stable);
  }
}

TEST_CASE("linear_S: identity for A = 0 and unitary for a Gaussian bump") {
  Setup free_su(0.0);
  const HamiltonianOp free_ham(free_su.grid, free_su.pot);
  const auto id = linear_S(free_su.phi, free_ham, free_su.spec());
  CHECK(l2_norm(id.phi_plus - free_su.phi) / l2_norm(free_su.phi) < 1e-10);

  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  const auto run = linear_S(su.phi, ham, su.spec());
  CHECK(std::abs(l2_norm(run.phi_plus) / l2_norm(su.phi) - 1.0) < 1e-6);
  CHECK(run.diag.t_stable);
  CHECK(run.diag.overlap_in < 1e-8);
  CHECK(run.diag.overlap_out < 1e-8);
  // S_L differs from the identity for a nonzero bump.
  CHECK(l2_norm(run.phi_plus - su.phi) / l2_norm(su.phi) > 1e-3);
}

TEST_CASE("nonlinear_S: nonlinearity off reduces to identity (vs_H) and S_L (vs_free)") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  auto spec = su.spec(ScatterMode::nonlinear_vs_h);
  spec.evo.include_nonlinearity = false;
  const auto vs_h = nonlinear_S(su.phi, ham, spec);
  CHECK(l2_norm(vs_h.phi_plus - su.phi) / l2_norm(su.phi) < 1e-9);

  spec.mode = ScatterMode::nonlinear_vs_free;
  const auto vs_free = nonlinear_S(su.phi, ham, spec);
  const auto sl = linear_S(su.phi, ham, su.spec());
  CHECK(l2_norm(vs_free.phi_plus - sl.phi_plus) / l2_norm(su.phi) < 1e-12);
}

TEST_CASE("nonlinear_S: (S - I) amplitude scales like eps^p for A = 0 (p = 3)") {
  Setup su(0.0);
  const HamiltonianOp ham(su.grid, su.pot);
  const auto spec = su.spec(ScatterMode::nonlinear_vs_free);
  auto deviation = [&](double eps) {
    const auto run = nonlinear_S(cplx{eps, 0.0} * su.phi, ham, spec);
    return l2_norm(run.phi_plus - cplx{eps, 0.0} * su.phi);
  };
  const double d1 = deviation(2e-2);
  const double d2 = deviation(1e-2);
  const double ratio = d1 / d2;  // expect 2^p = 8
  CHECK(ratio > 8.0 * 0.75);
  CHECK(ratio < 8.0 * 1.25);
  CHECK(d2 / (1e-2 * l2_norm(su.phi)) < 1e-3);  // small-data smallness of the correction
}

TEST_CASE("nonlinear_S: mass of phi_plus equals mass of phi_minus") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  const Field in = cplx{5e-2, 0.0} * su.phi;
  const auto run = nonlinear_S(in, ham, su.spec(ScatterMode::nonlinear_vs_free));
  CHECK(std::abs(l2_norm(run.phi_plus) / l2_norm(in) - 1.0) < 1e-6);
}

TEST_CASE("nonlinear_S: full S equals the wave-operator composition W+* S_A W-") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  const Field in = cplx{5e-2, 0.0} * su.phi;
  auto spec_free = su.spec(ScatterMode::nonlinear_vs_free);
  spec_free.run_t_check = false;
  const auto direct = nonlinear_S(in, ham, spec_free);

  auto spec_w = su.spec();
  spec_w.run_t_check = false;
  const Field w_minus = wave_operator(in, -1, ham, spec_w).phi_plus;
  auto spec_h = su.spec(ScatterMode::nonlinear_vs_h);
  spec_h.run_t_check = false;
  const Field s_a = nonlinear_S(w_minus, ham, spec_h).phi_plus;
  const Field composed = wave_operator_adjoint(s_a, +1, ham, spec_w);

  CHECK(l2_norm(direct.phi_plus - composed) / l2_norm(in) < 1e-6);
}

TEST_CASE("nonlinear_S: inverse run (time reversed) recovers phi_minus") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  const Field in = cplx{5e-2, 0.0} * su.phi;
  auto spec = su.spec(ScatterMode::nonlinear_vs_free);
  spec.run_t_check = false;
  const auto fwd = nonlinear_S(in, ham, spec);

  // Inverse: u(+T) = e^{+iT H0} phi_plus, backward nonlinear evolution to -T,
  // phi_minus = e^{+iT H0} u(-T).
  Field u = free_propagate(fwd.phi_plus, spec.t_scat);
  EvolutionSpec back = spec.evo;
  back.total_time = -2.0 * spec.t_scat;
  u = evolve(u, ham, back).u;
  u = free_propagate(u, spec.t_scat);
  CHECK(l2_norm(u - in) / l2_norm(in) < 1e-5);
}

TEST_CASE("nonlinear_S: smallness warning when the input exceeds delta") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  auto spec = su.spec(ScatterMode::nonlinear_vs_free);
  spec.run_t_check = false;
  spec.delta_smallness = 1e-3;  // force the warning
  const auto run = nonlinear_S(su.phi, ham, spec);
  CHECK(run.diag.smallness_warning);
}

TEST_CASE("norm_equivalence_check: identity cases and small-data ratio") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  // nonlinearity off: exact unit ratio
  auto spec = su.spec(ScatterMode::nonlinear_vs_h);
  spec.evo.include_nonlinearity = false;
  spec.run_t_check = false;
  const auto lin = nonlinear_S(su.phi, ham, spec);
  const auto rep_lin = norm_equivalence_check(su.phi, lin.phi_plus, ham);
  CHECK(std::abs(rep_lin.ratio - 1.0) < 1e-9);

  // eps = 1e-3 data: ratio within 1e-4 of 1
  spec.evo.include_nonlinearity = true;
  const Field in = cplx{1e-3, 0.0} * su.phi;
  const auto run = nonlinear_S(in, ham, spec);
  const auto rep = norm_equivalence_check(in, run.phi_plus, ham);
  CHECK(std::abs(rep.ratio - 1.0) < 1e-4);
  CHECK(rep.magnetic_ratio > 0.0);

  // global phase equivariance: S(e^{i theta} u) = e^{i theta} S(u)
  const cplx phase{std::cos(0.7), std::sin(0.7)};
  const auto run_ph = nonlinear_S(phase * in, ham, spec);
  CHECK(l2_norm(run_ph.phi_plus - phase * run.phi_plus) / l2_norm(in) < 1e-12);
}

TEST_CASE("T-stability: an unconverged horizon is flagged") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  auto spec = su.spec();
  spec.t_scat = 0.05;  // packet still sitting on the bump
  const auto run = linear_S(su.phi, ham, spec);
  CHECK_FALSE(run.diag.t_stable);
  CHECK(run.diag.flagged);
}
