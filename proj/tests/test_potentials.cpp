#include <doctest.h>

#include <cmath>

#include "magscat/potentials.hpp"

using namespace magscat;

TEST_CASE("build_potentials: zero descriptor gives zero fields, checks pass") {
  auto g = make_grid(2, 64, 8.0);
  const auto pot = build_potentials(PotentialDescriptor{}, g, 1.0);
  CHECK_FALSE(pot->has_a());
  CHECK_FALSE(pot->has_v());
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(pot->a(0)[i] == 0.0);
    CHECK(pot->b12()[i] == 0.0);
  }
  CHECK(pot->checks().all_core_checks_pass());
}

TEST_CASE("build_potentials: B12 of a Gaussian A2 bump matches the analytic derivative") {
  auto g = make_grid(2, 128, 8.0);
  PotentialDescriptor d;
  d.a[1].push_back({{0.0, 0.0}, 1.0, {M_SQRT1_2, M_SQRT1_2}});  // A2 = exp(-|x|^2)
  const auto pot = build_potentials(d, g, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto x = g->point(i);
    const double b_exact = -2.0 * x[0] * std::exp(-(x[0] * x[0] + x[1] * x[1]));
    worst = std::max(worst, std::abs(pot->b12()[i] - b_exact));
  }
  CHECK(worst < 1e-8);
  // antisymmetric accessor
  CHECK(pot->b(0, 1, 77) == -pot->b(1, 0, 77));
  CHECK(pot->b(0, 0, 77) == 0.0);
}

TEST_CASE("build_potentials: n=1 has empty B") {
  auto g = make_grid(1, 64, 8.0);
  PotentialDescriptor d;
  d.a[0].push_back({{0.0, 0.0}, 0.5, {1.0, 1.0}});
  const auto pot = build_potentials(d, g, 1.0);
  CHECK(pot->b12().empty());
  CHECK(pot->has_a());
}

TEST_CASE("build_potentials: rejects unresolvable and boundary-crowding bumps") {
  auto g = make_grid(1, 64, 8.0);  // h = 0.25
  PotentialDescriptor narrow;
  narrow.a[0].push_back({{0.0, 0.0}, 1.0, {0.125, 0.125}});  // h/2 < 3h
  CHECK_THROWS_AS(build_potentials(narrow, g, 1.0), std::invalid_argument);

  PotentialDescriptor edge;
  edge.v.push_back({{7.0, 0.0}, 1.0, {1.5, 1.5}});  // boundary value ~ e^{-0.22}
  CHECK_THROWS_AS(build_potentials(edge, g, 1.0), std::invalid_argument);
}

TEST_CASE("build_potentials: div A is the spectral divergence") {
  auto g = make_grid(2, 128, 8.0);
  PotentialDescriptor d;
  d.a[0].push_back({{0.3, -0.2}, 0.4, {1.0, 1.3}});
  const auto pot = build_potentials(d, g, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto x = g->point(i);
    const double expect = d.a[0][0].eval_derivative(x, 2, 0);
    worst = std::max(worst, std::abs(pot->div_a()[i] - expect));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("admissibility report: decaying V is recorded, not enforced") {
  auto g = make_grid(1, 128, 10.0);
  PotentialDescriptor d;
  d.v.push_back({{0.0, 0.0}, 0.3, {1.0, 1.0}});
  const auto pot = build_potentials(d, g, 1.0);
  CHECK_FALSE(pot->checks().v_lower_bound_positive);
  CHECK(pot->checks().v_min >= 0.0);
  CHECK(pot->checks().all_core_checks_pass());
  CHECK(pot->checks().a_exp_decay_sup >= 0.0);
}

TEST_CASE("from_samples: wraps raw data without admissibility claims") {
  auto g = make_grid(1, 64, 4.0);
  auto pot = PotentialSet::from_samples(g, {std::vector<double>(g->size(), 0.25), {}}, {});
  CHECK(pot->has_a());
  CHECK(pot->a(0)[10] == 0.25);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(pot->div_a()[i]) < 1e-12);
  CHECK(pot->checks().notes.size() == 1);
}
