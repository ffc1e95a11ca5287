#include <doctest.h>

#include <cmath>

#include "magscat/amplitude_probe.hpp"
#include "magscat/velocity_probe.hpp"

using namespace magscat;

namespace {

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

  ScatterSpec spec() const {
    ScatterSpec s;
    s.t_scat = 2.2;
    s.evo.dt = 2e-3;
    s.evo.p = 3.0;
    s.mode = ScatterMode::nonlinear_vs_free;
    return s;
  }
};

}  // namespace

TEST_CASE("fit_order: synthetic exact power law recovers the order to 1e-6") {
  EpsSweep sw;
  const cplx ref{0.8, -0.3};
  const cplx c{0.21, 0.11};
  for (const double e : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    sw.eps.push_back(e);
    sw.q.push_back(ref + c * e * e);
  }
  const auto fit = fit_order(sw, ref);
  CHECK(fit.order == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(fit.extrapolated - ref) < 1e-12);
}

TEST_CASE("fit_order: residuals at the numerical floor give a degenerate-fit error") {
  EpsSweep sw;
  const cplx ref{1.0, 0.0};
  for (const double e : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    sw.eps.push_back(e);
    sw.q.push_back(ref + cplx{1e-13, 0.0});
  }
  CHECK_THROWS_AS(fit_order(sw, ref), std::runtime_error);
}

TEST_CASE("sweep: ladder validation") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  CHECK_THROWS_AS(sweep(su.phi, su.phi, ham, {0.1}, su.spec()), std::invalid_argument);
  CHECK_THROWS_AS(sweep(su.phi, su.phi, ham, {0.1, 0.2}, su.spec()), std::invalid_argument);
  CHECK_THROWS_AS(geometric_ladder(0.1, 1.5, 5), std::invalid_argument);
  const auto lad = geometric_ladder(0.4, 0.5, 5);
  CHECK(lad.size() == 5);
  CHECK(lad[4] == doctest::Approx(0.025));
}

TEST_CASE("sweep: A = 0 pairing converges to (phi, psi) since S_L = I") {
  Setup su(0.0);
  const HamiltonianOp ham(su.grid, su.pot);
  auto spec = su.spec();
  spec.run_t_check = false;
  const Field psi = boost(gaussian_packet(su.grid, {0.3, 0.0}, 1.1), {6.0, 0.0}, 1.0, 1.1);
  const auto sw = sweep(su.phi, psi, ham, geometric_ladder(0.2, 0.5, 4), spec);
  const cplx direct = inner_product(su.phi, psi);
  CHECK(std::abs(sw.q.back() - direct) / std::abs(direct) < 1e-6);
  CHECK_FALSE(sw.flagged);
}

TEST_CASE("sweep + fit_order: 1-d rehearsal against the linear reference") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  auto spec = su.spec();
  const Field psi = su.phi;
  const auto sw = sweep(su.phi, psi, ham, geometric_ladder(0.4, 0.5, 5), spec);
  CHECK_FALSE(sw.flagged);

  ScatterSpec lin = spec;
  lin.mode = ScatterMode::linear;
  const cplx ref = inner_product(linear_S(su.phi, ham, lin).phi_plus, psi);
  const auto fit = fit_order(sw, ref);

  CHECK(fit.order > 1.7);
  CHECK(fit.order < 2.3);
  CHECK(std::abs(fit.extrapolated - ref) / std::abs(ref) < 1e-4);
  // residual monotonicity along the decreasing ladder
  for (std::size_t i = 0; i + 1 < fit.residuals.size(); ++i)
    CHECK(fit.residuals[i] > fit.residuals[i + 1]);
}

TEST_CASE("sweep: global phase of phi rotates q and reference together") {
  Setup su;
  const HamiltonianOp ham(su.grid, su.pot);
  auto spec = su.spec();
  spec.run_t_check = false;
  const cplx phase{std::cos(0.9), std::sin(0.9)};
  const std::vector<double> lad{0.2, 0.1};
  const auto sw = sweep(su.phi, su.phi, ham, lad, spec);
  const auto sw_rot = sweep(phase * su.phi, su.phi, ham, lad, spec);
  for (std::size_t i = 0; i < lad.size(); ++i)
    CHECK(std::abs(sw_rot.q[i] - phase * sw.q[i]) / std::abs(sw.q[i]) < 1e-10);
}
