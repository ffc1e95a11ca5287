#include "magscat/scattering.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace magscat {

namespace {

// Mass fraction of u inside the potential's effective support.
double support_overlap(const Field& u, const PotentialSet* pot) {
  if (!pot) return 0.0;
  double overlap = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double m = std::norm(u[i]);
    mass += m;
    overlap += m * pot->support_weight(i);
  }
  return mass > 0.0 ? overlap / mass : 0.0;
}

EvolutionSpec linear_spec(const EvolutionSpec& base, double total_time) {
  EvolutionSpec s = base;
  s.include_nonlinearity = false;
  s.total_time = total_time;
  s.checkpoint_stride = 0;
  s.series_stride = 0;
  return s;
}

Field group_propagate(const Field& u, const HamiltonianOp& ham, const EvolutionSpec& base,
                      double t, bool free_group) {
  if (free_group) return free_propagate(u, t);
  return evolve(u, ham, linear_spec(base, t)).u;
}

// One finite-T scattering pass; fills the overlap diagnostics.
Field scatter_once(const Field& phi_minus, const HamiltonianOp& ham, const ScatterSpec& spec,
                   double t_scat, ScatterDiagnostics* diag) {
  const bool nonlinear = spec.mode != ScatterMode::linear;
  const bool free_group = spec.mode != ScatterMode::nonlinear_vs_h;

  Field u = group_propagate(phi_minus, ham, spec.evo, -t_scat, free_group);
  if (diag) {
    diag->overlap_in = support_overlap(u, ham.potential().get());
    diag->mass_in = l2_norm(u);
    diag->mass_in *= diag->mass_in;
  }

  EvolutionSpec mid = spec.evo;
  mid.total_time = 2.0 * t_scat;
  mid.include_nonlinearity = nonlinear && spec.evo.include_nonlinearity;
  mid.checkpoint_stride = 0;
  mid.series_stride = 0;
  u = evolve(u, ham, mid).u;
  if (diag) {
    diag->overlap_out = support_overlap(u, ham.potential().get());
    diag->mass_out = l2_norm(u);
    diag->mass_out *= diag->mass_out;
  }

  return group_propagate(u, ham, spec.evo, -t_scat, free_group);
}

ScatterResult scatter_with_check(const Field& phi_minus, const HamiltonianOp& ham,
                                 const ScatterSpec& spec) {
  ScatterResult res;
  res.phi_plus = scatter_once(phi_minus, ham, spec, spec.t_scat, &res.diag);
  if (spec.run_t_check) {
    const Field check = scatter_once(phi_minus, ham, spec, spec.t_check_factor * spec.t_scat,
                                     nullptr);
    const double base = l2_norm(res.phi_plus);
    res.diag.t_stability_rel = base > 0.0 ? l2_norm(check - res.phi_plus) / base : 0.0;
    res.diag.t_stable = res.diag.t_stability_rel < spec.tol_t;
    if (!res.diag.t_stable) {
      res.diag.flagged = true;
      std::ostringstream os;
      os << "T-stability check failed: relative movement " << res.diag.t_stability_rel
         << " at factor " << spec.t_check_factor;
      res.diag.notes.push_back(os.str());
    }
  }
  return res;
}

}  // namespace

ScatterResult wave_operator(const Field& phi, int sign, const HamiltonianOp& ham,
                            const ScatterSpec& spec) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("wave_operator: sign must be +-1");
  auto run = [&](double T) {
    Field u = free_propagate(phi, sign * T);
    return evolve(u, ham, linear_spec(spec.evo, -sign * T)).u;
  };
  ScatterResult res;
  res.phi_plus = run(spec.t_scat);
  if (spec.run_t_check) {
    const Field check = run(spec.t_check_factor * spec.t_scat);
    const double base = l2_norm(res.phi_plus);
    res.diag.t_stability_rel = base > 0.0 ? l2_norm(check - res.phi_plus) / base : 0.0;
    res.diag.t_stable = res.diag.t_stability_rel < spec.tol_t;
    res.diag.flagged = !res.diag.t_stable;
  }
  return res;
}

Field wave_operator_adjoint(const Field& phi, int sign, const HamiltonianOp& ham,
                            const ScatterSpec& spec) {
  Field u = evolve(phi, ham, linear_spec(spec.evo, sign * spec.t_scat)).u;
  return free_propagate(u, -sign * spec.t_scat);
}

ScatterResult linear_S(const Field& phi, const HamiltonianOp& ham, const ScatterSpec& spec) {
  ScatterSpec s = spec;
  s.mode = ScatterMode::linear;
  return scatter_with_check(phi, ham, s);
}

ScatterResult nonlinear_S(const Field& phi_minus, const HamiltonianOp& ham,
                          const ScatterSpec& spec) {
  if (spec.mode == ScatterMode::linear)
    throw std::invalid_argument("nonlinear_S: mode must be nonlinear_vs_h or nonlinear_vs_free");
  ScatterResult res = scatter_with_check(phi_minus, ham, spec);
  if (spec.delta_smallness > 0.0 && h1_norm(phi_minus) > spec.delta_smallness) {
    res.diag.smallness_warning = true;
    res.diag.notes.push_back("input exceeds the smallness radius; fixed point may not contract");
  }
  return res;
}

PicardResult picard_solve(const Field& phi_minus, const HamiltonianOp& ham,
                          const PicardSpec& spec) {
  if (!(spec.t_span > 0.0) || !(spec.dt_quad > 0.0))
    throw std::invalid_argument("picard_solve: t_span and dt_quad must be positive");
  const int m_nodes = static_cast<int>(std::llround(2.0 * spec.t_span / spec.dt_quad));
  if (m_nodes < 2) throw std::invalid_argument("picard_solve: too few quadrature nodes");
  const double dtq = 2.0 * spec.t_span / m_nodes;
  const double p = spec.evo.p;

  PicardResult res;
  res.node_times.resize(static_cast<std::size_t>(m_nodes) + 1);
  for (int j = 0; j <= m_nodes; ++j) res.node_times[static_cast<std::size_t>(j)] = -spec.t_span + j * dtq;

  auto transport = [&](const Field& u, double dt_total) {
    return evolve(u, ham, linear_spec(spec.evo, dt_total)).u;
  };

  // Base trajectory b_j = e^{i t_j H} phi-.
  std::vector<Field> base(static_cast<std::size_t>(m_nodes) + 1);
  base[0] = transport(phi_minus, -spec.t_span);
  for (int j = 1; j <= m_nodes; ++j)
    base[static_cast<std::size_t>(j)] = transport(base[static_cast<std::size_t>(j - 1)], dtq);

  std::vector<Field> u = base;
  const bool nonlin_on = spec.evo.include_nonlinearity;
  auto nonlin = [&](const Field& w, Field& out) {
    if (!nonlin_on) {
      for (std::size_t i = 0; i < w.size(); ++i) out[i] = cplx{0.0, 0.0};
      return;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double amp = std::abs(w[i]);
      const double gpow = (amp > 0.0) ? std::pow(amp, p - 1.0) : 0.0;
      out[i] = cplx{0.0, -gpow} * w[i];  // -i |u|^{p-1} u
    }
  };

  // One Duhamel sweep: w_{j+1} = e^{i dtq H}(w_j + dtq/2 N_j) + dtq/2 N_{j+1}.
  std::vector<Field> next(u.size(), Field(phi_minus.grid_ptr()));
  Field nj(phi_minus.grid_ptr()), carry(phi_minus.grid_ptr());
  auto sweep = [&](const std::vector<Field>& cur, std::vector<Field>& out) {
    nonlin(cur[0], nj);
    out[0] = base[0];
    for (std::size_t i = 0; i < carry.size(); ++i) carry[i] = 0.5 * dtq * nj[i];
    for (int j = 1; j <= m_nodes; ++j) {
      carry = transport(carry, dtq);
      nonlin(cur[static_cast<std::size_t>(j)], nj);
      for (std::size_t i = 0; i < carry.size(); ++i) carry[i] += 0.5 * dtq * nj[i];
      out[static_cast<std::size_t>(j)] = base[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < carry.size(); ++i)
        out[static_cast<std::size_t>(j)][i] += carry[i];
      if (j < m_nodes)
        for (std::size_t i = 0; i < carry.size(); ++i) carry[i] += 0.5 * dtq * nj[i];
    }
  };

  double prev_diff = -1.0;
  int consecutive_expanding = 0;
  for (int it = 0; it < spec.max_iters; ++it) {
    sweep(u, next);
    double diff = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) diff = std::max(diff, l2_norm(next[j] - u[j]));
    std::swap(u, next);
    res.iterations = it + 1;
    res.final_update = diff;
    if (prev_diff > 0.0) {
      const double ratio = diff / prev_diff;
      res.contraction_ratios.push_back(ratio);
      if (ratio >= 1.0) {
        if (++consecutive_expanding >= 3) {
          std::ostringstream os;
          os << "picard_solve diverged: successive-difference ratio >= 1 for 3 iterations (last "
             << ratio << ")";
          throw PicardDivergence(os.str(), res.contraction_ratios);
        }
      } else {
        consecutive_expanding = 0;
      }
    }
    prev_diff = diff;
    if (diff < spec.tol) {
      res.converged = true;
      break;
    }
  }
  res.flagged = !res.converged &&
                (res.contraction_ratios.empty() || res.contraction_ratios.back() >= 1.0);

  // Integral-equation defect of the converged trajectory.
  sweep(u, next);
  double defect = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) defect = std::max(defect, l2_norm(next[j] - u[j]));
  res.residual = defect;

  res.phi_plus = transport(u[static_cast<std::size_t>(m_nodes)], -spec.t_span);
  res.trajectory = std::move(u);
  return res;
}

double calibrate_delta(const Field& phi, const HamiltonianOp& ham, const PicardSpec& spec,
                       double ratio_target) {
  PicardSpec probe = spec;
  probe.max_iters = 3;
  probe.tol = 0.0;  // force both ratios to be measured
  auto first_ratio = [&](double scale) {
    try {
      const auto r = picard_solve(cplx{scale, 0.0} * phi, ham, probe);
      return r.contraction_ratios.empty() ? 0.0 : r.contraction_ratios.front();
    } catch (const PicardDivergence&) {
      return 1e6;
    }
  };
  double lo = 0.0, hi = 1.0;
  // Grow until the target is bracketed (cap the search at x1024).
  while (first_ratio(hi) < ratio_target && hi < 1024.0) {
    lo = hi;
    hi *= 2.0;
  }
  if (hi >= 1024.0) return h1_norm(cplx{hi, 0.0} * phi);
  for (int i = 0; i < 12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (first_ratio(mid) < ratio_target ? lo : hi) = mid;
  }
  return h1_norm(cplx{0.5 * (lo + hi), 0.0} * phi);
}

NormEquivalenceReport norm_equivalence_check(const Field& phi_minus, const Field& phi_plus,
                                             const HamiltonianOp& ham) {
  NormEquivalenceReport rep;
  rep.h1_minus = h1_norm(phi_minus);
  rep.h1_plus = h1_norm(phi_plus);
  rep.ratio = rep.h1_minus > 0.0 ? rep.h1_plus / rep.h1_minus : 0.0;

  auto magnetic_h1 = [&](const Field& u) {
    const auto grad = gradient(u);
    const auto* pot = ham.potential().get();
    const bool with_a = ham.has_a();
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      acc += std::norm(u[i]);
      for (int d = 0; d < u.grid().dim(); ++d) {
        cplx cov = grad[static_cast<std::size_t>(d)][i];
        if (with_a) cov += cplx{0.0, pot->a(d)[i]} * u[i];
        acc += std::norm(cov);
      }
    }
    return std::sqrt(acc * u.grid().cell_volume());
  };
  const double mm = magnetic_h1(phi_minus);
  rep.magnetic_ratio = mm > 0.0 ? magnetic_h1(phi_plus) / mm : 0.0;
  return rep;
}

}  // namespace magscat
