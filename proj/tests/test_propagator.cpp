#include <doctest.h>

#include <cmath>
#include <random>

#include "magscat/propagator.hpp"
#include "magscat/velocity_probe.hpp"

using namespace magscat;

namespace {

PotentialPtr bump_a_1d(GridPtr g, double amp, double width = 1.2, double center = -1.0) {
  PotentialDescriptor d;
  d.a[0].push_back({{center, 0.0}, amp, {width, width}});
  return build_potentials(d, std::move(g), 1.0);
}

}  // namespace

TEST_CASE("free_propagate: t = 0 is the identity; lattice modes get exact phases") {
  auto g = make_grid(1, 64, 4.0);
  Field u(g);
  const double k = g->wavenumber(5);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = g->point(i)[0];
    u[i] = cplx{std::cos(k * x), std::sin(k * x)};
  }
  const Field id = free_propagate(u, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(id[i] - u[i]) < 1e-14);

  const double t = 0.37;
  const Field ut = free_propagate(u, t);
  const cplx phase{std::cos(-t * k * k), std::sin(-t * k * k)};
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(ut[i] - phase * u[i]) < 1e-13);
}

TEST_CASE("free_propagate: Gaussian closed form (1+2it)^{-1/2} exp(-x^2/(2(1+2it)))") {
  auto g = make_grid(1, 512, 30.0);
  const Field u0 = sample_field(g, [](std::array<double, 2> x) {
    return cplx{std::exp(-0.5 * x[0] * x[0]), 0.0};
  });
  const double t = 0.8;
  const Field ut = free_propagate(u0, t);
  const cplx a{1.0, 2.0 * t};
  double worst = 0.0;
  for (std::size_t i = 0; i < ut.size(); ++i) {
    const double x = g->point(i)[0];
    const cplx expect = std::exp(-x * x / (2.0 * a)) / std::sqrt(a);
    worst = std::max(worst, std::abs(ut[i] - expect));
  }
  CHECK(worst < 1e-10);
  // unitarity
  CHECK(std::abs(l2_norm(ut) / l2_norm(u0) - 1.0) < 1e-13);
}

TEST_CASE("apply_H: reduces to the spectral Laplacian for A = V = 0") {
  auto g = make_grid(1, 64, 4.0);
  const HamiltonianOp ham(g, nullptr);
  const double k = g->wavenumber(7);
  Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = g->point(i)[0];
    u[i] = cplx{std::cos(k * x), std::sin(k * x)};
  }
  const Field hu = apply_H(u, ham);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(hu[i] + k * k * u[i]) < 1e-10);
}

TEST_CASE("apply_H: constant A gives the shifted symbol -|k+a|^2") {
  auto g = make_grid(1, 64, 4.0);
  const double a = 0.3;
  const auto pot = PotentialSet::from_samples(g, {std::vector<double>(g->size(), a), {}}, {});
  const HamiltonianOp ham(g, pot);
  const double k = g->wavenumber(3);
  Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = g->point(i)[0];
    u[i] = cplx{std::cos(k * x), std::sin(k * x)};
  }
  const Field hu = apply_H(u, ham);
  const double expect = -(k + a) * (k + a);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(hu[i] - expect * u[i]) < 1e-12);
}

TEST_CASE("apply_H: self-adjointness on random resolved fields") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto g = make_grid(1, 256, 16.0);
  PotentialDescriptor d;
  d.a[0].push_back({{0.5, 0.0}, 0.3, {1.0, 1.0}});
  d.v.push_back({{-0.4, 0.0}, 0.25, {1.1, 1.1}});
  const HamiltonianOp ham(g, build_potentials(d, g, 1.0));
  for (int rep = 0; rep < 4; ++rep) {
    std::vector<cplx> sa(g->size()), sb(g->size());
    const double k0 = g->kmax() / 6.0;
    for (std::size_t i = 0; i < sa.size(); ++i) {
      const double env = std::exp(-g->k_squared(i) / (2.0 * k0 * k0));
      sa[i] = cplx{gauss(rng), gauss(rng)} * env;
      sb[i] = cplx{gauss(rng), gauss(rng)} * env;
    }
    const Field u = from_spectrum(g, sa), v = from_spectrum(g, sb);
    const cplx lhs = inner_product(apply_H(u, ham), v);
    const cplx rhs = inner_product(u, apply_H(v, ham));
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-9);
  }
}

TEST_CASE("evolve: A = V = 0 with nonlinearity off matches free_propagate") {
  auto g = make_grid(1, 256, 20.0);
  const HamiltonianOp ham(g, nullptr);
  const Field u0 = gaussian_packet(g, {0.0, 0.0}, 1.0);
  EvolutionSpec evo;
  evo.dt = 1e-3;
  evo.total_time = 1.0;
  evo.include_nonlinearity = false;
  CHECK(l2_norm(evolve(u0, ham, evo).u - free_propagate(u0, 1.0)) < 1e-10);
}

TEST_CASE("evolve: constant-A plane waves match exp(-it|k+a|^2) per mode") {
  auto g = make_grid(1, 64, 4.0);
  const double a = 0.25, T = 1.0;
  const auto pot = PotentialSet::from_samples(g, {std::vector<double>(g->size(), a), {}}, {});
  const HamiltonianOp ham(g, pot);
  Field u0(g);
  const std::vector<int> ms{1, 2, 61};  // 61 == mode -3
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const double x = g->point(i)[0];
    for (const int m : ms) {
      const double k = g->wavenumber(m);
      u0[i] += cplx{std::cos(k * x), std::sin(k * x)};
    }
  }
  EvolutionSpec evo;
  evo.dt = 1e-3;
  evo.total_time = T;
  evo.include_nonlinearity = false;
  const auto s0 = spectrum(u0);
  const auto sT = spectrum(evolve(u0, ham, evo).u);
  for (const int m : ms) {
    const double k = g->wavenumber(m);
    const double ph = -T * (k + a) * (k + a);
    const cplx expect = s0[static_cast<std::size_t>(m)] * cplx{std::cos(ph), std::sin(ph)};
    CHECK(std::abs(sT[static_cast<std::size_t>(m)] - expect) /
              std::abs(s0[static_cast<std::size_t>(m)]) <
          1e-11);
  }
}

TEST_CASE("evolve: dt-halving shows second order against a dt/8 reference") {
  auto g = make_grid(1, 512, 40.0);
  const HamiltonianOp ham(g, bump_a_1d(g, 0.25, 1.0));
  const Field u0 = boost(gaussian_packet(g, {0.0, 0.0}, 1.0), {3.0, 0.0}, 1.0, 1.0);
  EvolutionSpec evo;
  evo.total_time = 1.0;
  evo.p = 3.0;
  evo.dt = 2.5e-4;
  const Field ref = evolve(u0, ham, evo).u;
  evo.dt = 2e-3;
  const double e2 = l2_norm(evolve(u0, ham, evo).u - ref);
  evo.dt = 1e-3;
  const double e1 = l2_norm(evolve(u0, ham, evo).u - ref);
  const double ratio = e2 / e1;
  CHECK(ratio > 4.0 * 0.8);
  CHECK(ratio < 4.0 * 1.2);
}

TEST_CASE("evolve: CFL guards") {
  auto g = make_grid(1, 256, 4.0);  // kmax^2 ~ 1.01e4
  const HamiltonianOp ham(g, nullptr);
  EvolutionSpec evo;
  evo.total_time = 0.1;
  evo.dt = 2e-3;  // dt*kmax^2 ~ 20: beyond the resolvability bound
  CHECK_THROWS_AS(evolve(gaussian_packet(g, {0.0, 0.0}, 0.5), ham, evo), std::invalid_argument);

  evo.dt = 3e-4;  // dt*kmax^2 ~ 3: warning zone
  CHECK(evolve(gaussian_packet(g, {0.0, 0.0}, 0.5), ham, evo).cfl_warning);

  evo.dt = 1e-4;  // dt*kmax^2 ~ 1: clean
  CHECK_FALSE(evolve(gaussian_packet(g, {0.0, 0.0}, 0.5), ham, evo).cfl_warning);
}

TEST_CASE("conserved_quantities: zero field and normalized Gaussian mass") {
  auto g = make_grid(1, 256, 20.0);
  const HamiltonianOp ham(g, nullptr);
  const auto zero = conserved_quantities(Field(g), ham, 3.0);
  CHECK(zero.mass == 0.0);
  CHECK(zero.energy == 0.0);

  const auto cq = conserved_quantities(gaussian_packet(g, {0.0, 0.0}, 1.0), ham, 3.0);
  CHECK(cq.mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cq.energy > 0.0);
}

TEST_CASE("evolve: nonlinear trajectory conserves mass and energy (p=3, Gaussian A)") {
  auto g = make_grid(1, 1024, 40.0);
  const HamiltonianOp ham(g, bump_a_1d(g, 0.12, 1.2, -2.0));
  const Field u0 = cplx{0.35, 0.0} * boost(gaussian_packet(g, {0.0, 0.0}, 1.0), {2.0, 0.0}, 1.0, 1.0);
  EvolutionSpec evo;
  evo.dt = 1e-3;
  evo.total_time = 5.0;
  evo.p = 3.0;
  evo.series_stride = 500;
  const auto res = evolve(u0, ham, evo);
  const double m0 = res.series.front().mass, e0 = res.series.front().energy;
  for (const auto& s : res.series) {
    CHECK(std::abs(s.mass - m0) / m0 < 1e-6);
    CHECK(std::abs(s.energy - e0) / std::abs(e0) < 1e-6);
  }
}

TEST_CASE("evolve: linear flow is unitary and time-reversible") {
  auto g = make_grid(1, 512, 30.0);
  const HamiltonianOp ham(g, bump_a_1d(g, 0.2));
  const Field u0 = boost(gaussian_packet(g, {1.0, 0.0}, 1.0), {2.0, 0.0}, 1.0, 1.0);
  EvolutionSpec evo;
  evo.dt = 1e-3;
  evo.include_nonlinearity = false;
  evo.total_time = 2.0;
  const Field fwd = evolve(u0, ham, evo).u;
  CHECK(std::abs(l2_norm(fwd) / l2_norm(u0) - 1.0) < 1e-8);
  evo.total_time = -2.0;
  CHECK(l2_norm(evolve(fwd, ham, evo).u - u0) < 1e-7);
}

TEST_CASE("evolve: p <= 1 + 2/n raises the regime warning flag") {
  auto g = make_grid(1, 256, 20.0);
  const HamiltonianOp ham(g, nullptr);
  EvolutionSpec evo;
  evo.dt = 1e-3;
  evo.total_time = 0.01;
  evo.p = 2.5;  // 1 + 2/n = 3 for n = 1
  CHECK(evolve(gaussian_packet(g, {0.0, 0.0}, 1.0), ham, evo).p_regime_warning);
  evo.p = 3.5;
  CHECK_FALSE(evolve(gaussian_packet(g, {0.0, 0.0}, 1.0), ham, evo).p_regime_warning);
}
