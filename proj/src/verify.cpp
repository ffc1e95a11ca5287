#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

#include "magscat/amplitude_probe.hpp"
#include "magscat/runner.hpp"
#include "magscat/scattering.hpp"
#include "magscat/velocity_probe.hpp"

namespace magscat::runner {

namespace {

Field random_field(GridPtr grid, std::mt19937_64& rng, double decay = 3.5) {
  // Random smooth field: random spectrum with Gaussian band envelope, so
  // norms and products stay resolved.
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> spec(grid->size());
  const double k0 = grid->kmax() / (2.0 * decay);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double k2 = grid->k_squared(i);
    const double env = std::exp(-k2 / (2.0 * k0 * k0));
    spec[i] = cplx{gauss(rng), gauss(rng)} * env;
  }
  return from_spectrum(std::move(grid), std::move(spec));
}

PotentialPtr test_potential_1d(GridPtr grid, double amp = 0.2) {
  PotentialDescriptor d;
  d.a[0].push_back({{-1.0, 0.0}, amp, {1.2, 1.2}});
  return build_potentials(d, std::move(grid), 1.0);
}

PotentialPtr test_potential_2d(GridPtr grid) {
  PotentialDescriptor d;
  d.a[0].push_back({{0.4, -0.3}, 0.15, {1.1, 0.9}});
  d.a[1].push_back({{-0.3, 0.2}, 0.12, {0.9, 1.2}});
  d.v.push_back({{0.1, 0.3}, 0.2, {1.0, 1.0}});
  return build_potentials(d, std::move(grid), 1.0);
}

}  // namespace

std::vector<VerifyCheck> verify(const VerifyOptions& opt) {
  std::map<std::string, std::function<VerifyCheck()>> checks;
  std::mt19937_64 rng(opt.seed);

  checks["parseval"] = [&] {
    double worst = 0.0;
    for (int dim : {1, 2}) {
      auto grid = make_grid(dim, dim == 1 ? 256 : 128, dim == 1 ? 20.0 : 8.0);
      for (int rep = 0; rep < 3; ++rep) {
        const Field u = random_field(grid, rng);
        const double a = l2_norm(u), b = l2_norm_spectral(u);
        worst = std::max(worst, std::abs(a - b) / a);
      }
    }
    return VerifyCheck{"parseval", worst <= 1e-12, worst, 1e-12,
                       "spatial vs spectral L2 on random fields"};
  };

  checks["spectral_derivative"] = [&] {
    auto grid = make_grid(1, 256, 20.0);
    const double k = grid->wavenumber(7);
    Field u(grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double x = grid->point(i)[0];
      u[i] = cplx{std::cos(k * x), std::sin(k * x)};
    }
    const Field du = spectral_derivative(u, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      worst = std::max(worst, std::abs(du[i] - cplx{0.0, k} * u[i]));
    return VerifyCheck{"spectral_derivative", worst <= 1e-12, worst, 1e-12,
                       "d/dx of a lattice mode equals ik times the mode"};
  };

  checks["mode_orthogonality"] = [&] {
    auto grid = make_grid(1, 256, 20.0);
    Field u(grid), v(grid);
    const double k1 = grid->wavenumber(3), k2 = grid->wavenumber(9);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double x = grid->point(i)[0];
      u[i] = cplx{std::cos(k1 * x), std::sin(k1 * x)};
      v[i] = cplx{std::cos(k2 * x), std::sin(k2 * x)};
    }
    const double val = std::abs(inner_product(u, v));
    return VerifyCheck{"mode_orthogonality", val <= 1e-12, val, 1e-12,
                       "distinct lattice modes are orthogonal"};
  };

  checks["b_antisymmetry_analytic"] = [&] {
    auto grid = make_grid(2, 128, 8.0);
    PotentialDescriptor d;
    d.a[1].push_back({{0.0, 0.0}, 1.0, {M_SQRT1_2, M_SQRT1_2}});  // A2 = exp(-|x|^2)
    const auto pot = build_potentials(d, grid, 1.0);
    // B12 = d1 A2 = -2 x1 exp(-|x|^2) for A2 = exp(-|x|^2).
    double worst = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const auto x = grid->point(i);
      const double b_exact = -2.0 * x[0] * std::exp(-(x[0] * x[0] + x[1] * x[1]));
      worst = std::max(worst, std::abs(pot->b12()[i] - b_exact));
    }
    return VerifyCheck{"b_antisymmetry_analytic", worst <= 1e-8, worst, 1e-8,
                       "spectral B12 matches the analytic derivative"};
  };

  checks["sigma_norm"] = [&] {
    auto grid = make_grid(1, 256, 20.0);
    const Field u = gaussian_packet(grid, {0.0, 0.0}, 1.0);
    const auto p = default_sigma_params(1);
    const double s1 = sigma_norm(u, p);
    const double s2 = sigma_norm(cplx{2.0, 0.0} * u, p);
    const double hom = std::abs(s2 - 2.0 * s1) / s1;
    double tri_worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
      const Field a = random_field(grid, rng), b = random_field(grid, rng);
      tri_worst = std::max(tri_worst, sigma_norm(a + b, p) - sigma_norm(a, p) - sigma_norm(b, p));
    }
    const double val = std::max(hom, tri_worst);
    return VerifyCheck{"sigma_norm", hom <= 1e-12 && tri_worst <= 1e-10, val, 1e-10,
                       "homogeneity and triangle inequality"};
  };

  checks["inner_conjugate"] = [&] {
    auto grid = make_grid(1, 256, 20.0);
    const Field u = random_field(grid, rng), v = random_field(grid, rng);
    const double val = std::abs(inner_product(u, v) - std::conj(inner_product(v, u)));
    return VerifyCheck{"inner_conjugate", val <= 1e-12, val, 1e-12,
                       "(u, v) == conj((v, u))"};
  };

  checks["unitarity"] = [&] {
    auto grid = make_grid(1, 256, 20.0);
    const HamiltonianOp ham(grid, test_potential_1d(grid));
    EvolutionSpec evo;
    evo.dt = 1e-3;
    evo.total_time = 2.0;
    evo.include_nonlinearity = false;
    evo.corrupt_div_sign = opt.inject_fault;
    const Field u0 = boost(gaussian_packet(grid, {2.0, 0.0}, 1.0), {2.0, 0.0}, 1.0, 1.0);
    const auto res = evolve(u0, ham, evo);
    const double val = std::abs(l2_norm(res.u) / l2_norm(u0) - 1.0);
    return VerifyCheck{"unitarity", val <= 1e-8, val, 1e-8,
                       "linear flow preserves the L2 norm"};
  };

  checks["reversibility"] = [&] {
    auto grid = make_grid(1, 256, 20.0);
    const HamiltonianOp ham(grid, test_potential_1d(grid));
    EvolutionSpec evo;
    evo.dt = 1e-3;
    evo.include_nonlinearity = false;
    const Field u0 = boost(gaussian_packet(grid, {2.0, 0.0}, 1.0), {2.0, 0.0}, 1.0, 1.0);
    evo.total_time = 2.0;
    const Field fwd = evolve(u0, ham, evo).u;
    evo.total_time = -2.0;
    const double val = l2_norm(evolve(fwd, ham, evo).u - u0);
    return VerifyCheck{"reversibility", val <= 1e-7, val, 1e-7,
                       "forward T then backward T returns the state"};
  };

  checks["free_consistency"] = [&] {
    auto grid = make_grid(1, 256, 20.0);
    const HamiltonianOp ham(grid, nullptr);
    EvolutionSpec evo;
    evo.dt = 1e-3;
    evo.total_time = 1.0;
    evo.include_nonlinearity = false;
    evo.corrupt_div_sign = opt.inject_fault;
    const Field u0 = gaussian_packet(grid, {0.0, 0.0}, 1.0);
    const double val = l2_norm(evolve(u0, ham, evo).u - free_propagate(u0, 1.0));
    return VerifyCheck{"free_consistency", val <= 1e-10, val, 1e-10,
                       "A = V = 0 evolution equals the exact free propagator"};
  };

  checks["strang_order"] = [&] {
    auto grid = make_grid(1, 256, 20.0);
    const HamiltonianOp ham(grid, test_potential_1d(grid, 0.25));
    const Field u0 = boost(gaussian_packet(grid, {1.0, 0.0}, 1.0), {2.0, 0.0}, 1.0, 1.0);
    EvolutionSpec evo;
    evo.total_time = 1.0;
    evo.p = 3.0;
    evo.dt = 2.5e-4;
    const Field ref = evolve(u0, ham, evo).u;
    evo.dt = 4e-3;
    const double e1 = l2_norm(evolve(u0, ham, evo).u - ref);
    evo.dt = 2e-3;
    const double e2 = l2_norm(evolve(u0, ham, evo).u - ref);
    const double order = std::log2(e1 / e2);
    return VerifyCheck{"strang_order", order >= 1.7 && order <= 2.3, order, 2.0,
                       "dt-halving error ratio near 4"};
  };

  checks["gauge_shift"] = [&] {
    // Constant shift A -> A + c on a plane wave re-indexes the symbol
    // k -> k + c; both flows are diagonal and exactly computable.
    auto grid = make_grid(1, 64, 4.0);
    const double a = 0.2, c = 0.35, T = 1.0;
    auto mk_pot = [&](double offs) {
      return PotentialSet::from_samples(grid, {std::vector<double>(grid->size(), a + offs), {}}, {});
    };
    Field u0(grid);
    const double k = grid->wavenumber(5);
    for (std::size_t i = 0; i < u0.size(); ++i) {
      const double x = grid->point(i)[0];
      u0[i] = cplx{std::cos(k * x), std::sin(k * x)};
    }
    EvolutionSpec evo;
    evo.dt = 1e-3;
    evo.total_time = T;
    evo.include_nonlinearity = false;
    const Field ua = evolve(u0, HamiltonianOp(grid, mk_pot(0.0)), evo).u;
    const Field uac = evolve(u0, HamiltonianOp(grid, mk_pot(c)), evo).u;
    // Exact symbol re-indexing: phases -T(k+a)^2 vs -T(k+a+c)^2.
    const double dphi = -T * ((k + a + c) * (k + a + c) - (k + a) * (k + a));
    double worst = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i)
      worst = std::max(worst, std::abs(uac[i] - ua[i] * cplx{std::cos(dphi), std::sin(dphi)}));
    return VerifyCheck{"gauge_shift", worst <= 1e-10, worst, 1e-10,
                       "constant-shift consistency on plane waves"};
  };

  checks["sl_linearity"] = [&] {
    auto grid = make_grid(1, 256, 20.0);
    const HamiltonianOp ham(grid, test_potential_1d(grid));
    ScatterSpec spec;
    spec.t_scat = 1.6;
    spec.evo.dt = 2e-3;
    spec.run_t_check = false;
    const Field phi = boost(gaussian_packet(grid, {0.0, 0.0}, 1.0), {5.0, 0.0}, 1.0, 1.0);
    const Field psi = boost(gaussian_packet(grid, {0.5, 0.0}, 1.2), {5.0, 0.0}, 1.0, 1.2);
    const cplx alpha{0.7, 0.2}, beta{-0.3, 0.5};
    const Field lhs = linear_S(alpha * phi + beta * psi, ham, spec).phi_plus;
    Field rhs = alpha * linear_S(phi, ham, spec).phi_plus;
    rhs += beta * linear_S(psi, ham, spec).phi_plus;
    const double val = l2_norm(lhs - rhs) / l2_norm(rhs);
    return VerifyCheck{"sl_linearity", val <= 1e-8, val, 1e-8,
                       "S_L(a phi + b psi) == a S_L phi + b S_L psi"};
  };

  checks["picard_residual"] = [&] {
    auto grid = make_grid(1, 512, 30.0);
    const HamiltonianOp ham(grid, test_potential_1d(grid, 0.1));
    PicardSpec pic;
    pic.t_span = 1.2;
    pic.dt_quad = 0.02;
    pic.evo.dt = 2e-3;
    const Field phi = cplx{0.01, 0.0} * boost(gaussian_packet(grid, {0.0, 0.0}, 1.0),
                                              {5.0, 0.0}, 1.0, 1.0);
    const auto res = picard_solve(phi, ham, pic);
    return VerifyCheck{"picard_residual", res.converged && res.residual <= 1e-6, res.residual,
                       1e-6, "integral-equation defect at the fixed point"};
  };

  checks["fbp_rotation"] = [&] {
    // Rotating the phantom by 90 degrees rotates the reconstruction.
    auto grid = make_grid(2, 128, 6.0);
    GaussianBump b{{1.0, 0.4}, 1.0, {0.8, 0.6}};
    GaussianBump b_rot{{-0.4, 1.0}, 1.0, {0.6, 0.8}};  // widths swap under 90-deg rotation
    const auto angles = uniform_angles(32);
    const auto offsets = uniform_offsets(65, 6.0);
    const auto rec = fbp_invert(xray_forward({b}, angles, offsets), grid);
    const auto rec_rot = fbp_invert(xray_forward({b_rot}, angles, offsets), grid);
    // rec_rot(x, y) must equal rec(y, -x); on the grid, -x_i = x_{(n-i) mod n}
    // (the wrap row is skipped, both fields vanish there).
    const int n = grid->n_per_axis();
    double num = 0.0, den = 0.0;
    for (int ix = 1; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const double a = rec_rot.values[grid->index(ix, iy)];
        const double bv = rec.values[grid->index(iy, n - ix)];
        num += (a - bv) * (a - bv);
        den += a * a;
      }
    const double val = std::sqrt(num / den);
    return VerifyCheck{"fbp_rotation", val <= 1e-6, val, 1e-6,
                       "90-degree rotation covariance of FBP"};
  };

  checks["fbp_refinement"] = [&] {
    auto grid = make_grid(2, 128, 6.0);
    PotentialDescriptor d;
    d.v.push_back({{0.3, -0.2}, 1.0, {0.8, 0.8}});
    const auto pot = build_potentials(d, grid, 1.0);
    double prev = 1e9;
    bool monotone = true;
    double last = 0.0;
    for (const auto& [na, ns] : {std::pair{24, 49}, std::pair{48, 97}, std::pair{96, 193}}) {
      const auto rec =
          fbp_invert(xray_forward(d.v, uniform_angles(na), uniform_offsets(ns, 6.0)), grid);
      last = field_error("V", rec.values, pot->v(), *grid).rel_l2;
      monotone = monotone && last < prev;
      prev = last;
    }
    return VerifyCheck{"fbp_refinement", monotone, last, 0.0,
                       "reconstruction error decreases over an (angles, offsets) ladder"};
  };

  checks["reproject"] = [&] {
    auto grid = make_grid(2, 128, 6.0);
    PotentialDescriptor d;
    d.v.push_back({{0.0, 0.0}, 1.0, {0.9, 0.9}});
    const auto angles = uniform_angles(90);
    const auto offsets = uniform_offsets(129, 6.0);
    const auto sino = xray_forward(d.v, angles, offsets);
    const auto rec = fbp_invert(sino, grid);
    const auto sino2 = xray_forward(rec.values, grid, angles, offsets);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < sino.values.size(); ++i) {
      num += std::norm(sino2.values[i] - sino.values[i]);
      den += std::norm(sino.values[i]);
    }
    const double val = std::sqrt(num / den);
    return VerifyCheck{"reproject", val <= 0.10, val, 0.10,
                       "xray_forward(fbp_invert(sino)) matches sino"};
  };

  checks["sinogram_translation"] = [&] {
    // Shifting every bump by d shifts the sinogram in offset by perp(theta).d.
    GaussianBump b{{0.2, -0.1}, 0.7, {0.9, 1.1}};
    const std::array<double, 2> d{0.6, -0.3};
    GaussianBump bs = b;
    bs.center = {b.center[0] + d[0], b.center[1] + d[1]};
    double worst = 0.0;
    for (const double ang : uniform_angles(8)) {
      const double pd = -std::sin(ang) * d[0] + std::cos(ang) * d[1];
      for (const double s : {-1.0, 0.0, 0.8})
        worst = std::max(worst, std::abs(bump_line_integral(bs, ang, s + pd) -
                                         bump_line_integral(b, ang, s)));
    }
    return VerifyCheck{"sinogram_translation", worst <= 1e-10, worst, 1e-10,
                       "offset shift by perp(theta).d under bump translation"};
  };

  checks["boost_modulus"] = [&] {
    auto grid = make_grid(2, 128, 8.0);
    const Field phi = gaussian_packet(grid, {0.5, -0.3}, 0.8);
    const Field b = boost(phi, {4.0, 3.0}, 1.0, 0.8);
    double worst = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i)
      worst = std::max(worst, std::abs(std::abs(b[i]) - std::abs(phi[i])));
    // Spectral peak must sit at the boost wavevector.
    const auto spec = spectrum(b);
    std::size_t imax = 0;
    for (std::size_t i = 1; i < spec.size(); ++i)
      if (std::norm(spec[i]) > std::norm(spec[imax])) imax = i;
    const auto kpk = grid->wavevector(imax);
    const bool peak_ok = std::abs(kpk[0] - 4.0) <= M_PI / 8.0 + 1e-9 &&
                         std::abs(kpk[1] - 3.0) <= M_PI / 8.0 + 1e-9;
    return VerifyCheck{"boost_modulus", worst <= 1e-12 && peak_ok, worst, 1e-12,
                       "pointwise modulus preserved; spectrum relocated by m xi"};
  };

  checks["xray_dual_path"] = [&] {
    auto grid = make_grid(2, 256, 6.0);
    PotentialDescriptor d;
    d.v.push_back({{0.4, -0.2}, 1.0, {0.8, 1.1}});
    const auto pot = build_potentials(d, grid, 1.0);
    const auto angles = uniform_angles(16);
    const auto offsets = uniform_offsets(65, 6.0);
    const auto s_desc = xray_forward(d.v, angles, offsets);
    const auto s_grid = xray_forward(pot->v(), grid, angles, offsets);
    double worst = 0.0;
    for (std::size_t i = 0; i < s_desc.values.size(); ++i)
      worst = std::max(worst, std::abs(s_desc.values[i] - s_grid.values[i]));
    return VerifyCheck{"xray_dual_path", worst <= 1e-6, worst, 1e-6,
                       "descriptor vs grid-quadrature line integrals"};
  };

  // Selection handling.
  std::vector<std::string> wanted;
  if (opt.selection.empty()) {
    for (const auto& [name, _] : checks) wanted.push_back(name);
  } else {
    for (const auto& name : opt.selection) {
      if (!checks.count(name)) throw std::invalid_argument("verify: unknown check '" + name + "'");
      wanted.push_back(name);
    }
  }
  if (wanted.empty()) throw std::invalid_argument("verify: empty suite selection");

  std::vector<VerifyCheck> results;
  results.reserve(wanted.size());
  for (const auto& name : wanted) results.push_back(checks[name]());
  return results;
}

}  // namespace magscat::runner
