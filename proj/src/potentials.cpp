#include "magscat/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace magscat {

double GaussianBump::eval(std::array<double, 2> x, int dim) const {
  double q = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double z = x[static_cast<std::size_t>(d)] - center[static_cast<std::size_t>(d)];
    const double w = widths[static_cast<std::size_t>(d)];
    q += z * z / (2.0 * w * w);
  }
  return amplitude * std::exp(-q);
}

double GaussianBump::eval_derivative(std::array<double, 2> x, int dim, int axis) const {
  const double z = x[static_cast<std::size_t>(axis)] - center[static_cast<std::size_t>(axis)];
  const double w = widths[static_cast<std::size_t>(axis)];
  return eval(x, dim) * (-z / (w * w));
}

double PotentialDescriptor::eval_a(int component, std::array<double, 2> x, int dim) const {
  double s = 0.0;
  for (const auto& b : a[static_cast<std::size_t>(component)]) s += b.eval(x, dim);
  return s;
}

double PotentialDescriptor::eval_v(std::array<double, 2> x, int dim) const {
  double s = 0.0;
  for (const auto& b : v) s += b.eval(x, dim);
  return s;
}

namespace {

std::vector<double> real_spectral_derivative(const Grid& g, const std::vector<double>& f, int axis) {
  std::vector<cplx> buf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) buf[i] = f[i];
  auto& ws = workspace_for(g);
  ws.forward(buf.data());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const auto k = g.wavevector(i);
    buf[i] *= cplx{0.0, k[static_cast<std::size_t>(axis)]};
  }
  ws.backward(buf.data());
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = buf[i].real();
  return out;
}

void sample_bumps(const Grid& g, const std::vector<GaussianBump>& bumps, std::vector<double>& out) {
  out.assign(g.size(), 0.0);
  for (const auto& b : bumps)
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += b.eval(g.point(i), g.dim());
}

}  // namespace

std::shared_ptr<const PotentialSet> PotentialSet::build(const PotentialDescriptor& desc,
                                                        GridPtr grid, double gamma0) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("build_potentials: gamma0 must be positive");
  auto ps = std::shared_ptr<PotentialSet>(new PotentialSet());
  ps->grid_ = std::move(grid);
  ps->desc_ = desc;
  ps->gamma0_ = gamma0;
  ps->from_descriptor_ = true;

  const Grid& g = *ps->grid_;
  const double h = g.spacing();
  auto check_bumps = [&](const std::vector<GaussianBump>& bumps, const char* what) {
    for (const auto& b : bumps) {
      for (int d = 0; d < g.dim(); ++d)
        if (b.widths[static_cast<std::size_t>(d)] < 3.0 * h)
          throw std::invalid_argument(std::string("build_potentials: ") + what +
                                      " bump width < 3h, unresolvable on this grid");
      // Worst-case boundary amplitude along each axis (corner for n=2).
      std::array<double, 2> corner{};
      for (int d = 0; d < g.dim(); ++d) {
        const double c = b.center[static_cast<std::size_t>(d)];
        corner[static_cast<std::size_t>(d)] =
            (std::abs(-g.half_width() - c) < std::abs(g.half_width() - c)) ? -g.half_width()
                                                                           : g.half_width();
      }
      if (std::abs(b.eval(corner, g.dim())) > 1e-10 * std::abs(b.amplitude) &&
          b.amplitude != 0.0)
        throw std::invalid_argument(std::string("build_potentials: ") + what +
                                    " bump not negligible at the box boundary");
    }
  };
  check_bumps(desc.a[0], "A1");
  if (g.dim() == 2) check_bumps(desc.a[1], "A2");
  check_bumps(desc.v, "V");

  sample_bumps(g, desc.a[0], ps->a_[0]);
  if (g.dim() == 2)
    sample_bumps(g, desc.a[1], ps->a_[1]);
  else
    ps->a_[1].clear();
  sample_bumps(g, desc.v, ps->v_);
  ps->has_a_ = desc.has_a();
  ps->has_v_ = desc.has_v();

  ps->derive_fields();
  ps->run_checks();
  return ps;
}

std::shared_ptr<const PotentialSet> PotentialSet::from_samples(GridPtr grid,
                                                               std::array<std::vector<double>, 2> a,
                                                               std::vector<double> v) {
  auto ps = std::shared_ptr<PotentialSet>(new PotentialSet());
  ps->grid_ = std::move(grid);
  const Grid& g = *ps->grid_;
  auto fit = [&](std::vector<double>& f) {
    if (f.empty()) f.assign(g.size(), 0.0);
    if (f.size() != g.size()) throw std::invalid_argument("from_samples: size mismatch");
  };
  ps->has_a_ = !a[0].empty() || !a[1].empty();
  ps->has_v_ = !v.empty();
  ps->a_ = std::move(a);
  ps->v_ = std::move(v);
  fit(ps->a_[0]);
  if (g.dim() == 2) fit(ps->a_[1]);
  fit(ps->v_);
  ps->derive_fields();
  ps->checks_.notes.push_back("constructed from raw samples; admissibility checks skipped");
  return ps;
}

void PotentialSet::derive_fields() {
  const Grid& g = *grid_;
  const std::size_t sz = g.size();
  div_a_.assign(sz, 0.0);
  a_sq_.assign(sz, 0.0);
  if (has_a_) {
    auto d0 = real_spectral_derivative(g, a_[0], 0);
    for (std::size_t i = 0; i < sz; ++i) div_a_[i] = d0[i];
    if (g.dim() == 2) {
      auto d1 = real_spectral_derivative(g, a_[1], 1);
      for (std::size_t i = 0; i < sz; ++i) div_a_[i] += d1[i];
    }
    for (std::size_t i = 0; i < sz; ++i) {
      double s = a_[0][i] * a_[0][i];
      if (g.dim() == 2) s += a_[1][i] * a_[1][i];
      a_sq_[i] = s;
    }
  }
  // B_12 = d1 A_2 - d2 A_1 (n=2 only; empty in n=1).
  b12_.clear();
  if (g.dim() == 2) {
    b12_.assign(sz, 0.0);
    if (has_a_) {
      auto d1a2 = real_spectral_derivative(g, a_[1], 0);
      auto d2a1 = real_spectral_derivative(g, a_[0], 1);
      for (std::size_t i = 0; i < sz; ++i) b12_[i] = d1a2[i] - d2a1[i];
    }
  }
  weight_peak_ = 0.0;
  for (std::size_t i = 0; i < sz; ++i) weight_peak_ = std::max(weight_peak_, support_weight_raw(i));
}

double PotentialSet::b(int j, int k, std::size_t flat) const {
  if (grid_->dim() != 2 || b12_.empty()) return 0.0;
  if (j == k) return 0.0;
  return (j == 0 && k == 1) ? b12_[flat] : -b12_[flat];
}

double PotentialSet::support_weight_raw(std::size_t flat) const {
  double amag = std::abs(a_[0][flat]);
  if (grid_->dim() == 2) amag = std::hypot(a_[0][flat], a_[1][flat]);
  return std::max(amag, std::abs(v_[flat]));
}

double PotentialSet::support_weight(std::size_t flat) const {
  if (weight_peak_ <= 0.0) return 0.0;
  return support_weight_raw(flat) / weight_peak_;
}

void PotentialSet::run_checks() {
  const Grid& g = *grid_;
  checks_ = AdmissibilityReport{};
  const std::size_t sz = g.size();

  // Assumption surrogate: sup |A| e^{gamma0 <x>} finite and attained in the
  // interior (decay at least e^{-gamma0 |x|} near the edge).
  double sup_val = 0.0;
  std::size_t sup_idx = 0;
  for (std::size_t i = 0; i < sz; ++i) {
    const auto x = g.point(i);
    const double r2 = x[0] * x[0] + (g.dim() == 2 ? x[1] * x[1] : 0.0);
    double amag = std::abs(a_[0][i]);
    if (g.dim() == 2) amag = std::hypot(a_[0][i], a_[1][i]);
    const double val = amag * std::exp(gamma0_ * std::sqrt(1.0 + r2));
    if (val > sup_val) {
      sup_val = val;
      sup_idx = i;
    }
  }
  checks_.a_exp_decay_sup = sup_val;
  if (has_a_ && sup_val > 0.0) {
    const auto xs = g.point(sup_idx);
    const double edge = 0.9 * g.half_width();
    checks_.a_exp_decay_ok =
        std::abs(xs[0]) < edge && (g.dim() == 1 || std::abs(xs[1]) < edge);
  }

  // |B| and |grad B| against (1+|x|)^{-n-eps} at eps = 1/2, alpha in {0,1}.
  if (!b12_.empty()) {
    auto gb0 = real_spectral_derivative(g, b12_, 0);
    auto gb1 = real_spectral_derivative(g, b12_, 1);
    for (std::size_t i = 0; i < sz; ++i) {
      const auto x = g.point(i);
      const double w = std::pow(1.0 + std::hypot(x[0], x[1]), g.dim() + 0.5);
      checks_.b_decay_sup = std::max(checks_.b_decay_sup, std::abs(b12_[i]) * w);
      checks_.b_grad_decay_sup =
          std::max(checks_.b_grad_decay_sup, std::hypot(gb0[i], gb1[i]) * w);
    }
  }

  double vmin = 0.0, vmax = 0.0;
  if (has_v_) {
    vmin = v_[0];
    for (const double x : v_) {
      vmin = std::min(vmin, x);
      vmax = std::max(vmax, std::abs(x));
    }
  }
  checks_.v_min = vmin;
  // "V >= m > 0" surrogate: the grid minimum must be a meaningful fraction
  // of the peak, not just a positive tail value.
  checks_.v_lower_bound_positive = has_v_ && vmin > 1e-8 * vmax;
  if (has_v_ && !checks_.v_lower_bound_positive)
    checks_.notes.push_back(
        "V has no positive lower bound on the grid (decaying V; recorded, not enforced)");
}

PotentialPtr build_potentials(const PotentialDescriptor& desc, GridPtr grid, double gamma0) {
  return PotentialSet::build(desc, std::move(grid), gamma0);
}

}  // namespace magscat
