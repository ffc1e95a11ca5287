#include "magscat/field.hpp"

#include <cmath>
#include <stdexcept>

namespace magscat {

Field::Field(GridPtr grid, std::vector<cplx> values) : grid_(std::move(grid)), v_(std::move(values)) {
  if (v_.size() != grid_->size()) throw std::invalid_argument("Field: value count != grid size");
}

Field& Field::operator+=(const Field& o) {
  if (!grid_->same_as(o.grid())) throw std::invalid_argument("Field: grid mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  if (!grid_->same_as(o.grid())) throw std::invalid_argument("Field: grid mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

Field& Field::operator*=(cplx a) {
  for (auto& x : v_) x *= a;
  return *this;
}

bool Field::all_finite() const {
  for (const auto& x : v_)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  return true;
}

Field sample_field(GridPtr grid, const std::function<cplx(std::array<double, 2>)>& f) {
  Field out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(grid->point(i));
  return out;
}

Field gaussian_packet(GridPtr grid, std::array<double, 2> center, double sigma) {
  const int n = grid->dim();
  const double norm = std::pow(M_PI * sigma * sigma, -0.25 * n);
  Field out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = grid->point(i);
    double r2 = (x[0] - center[0]) * (x[0] - center[0]);
    if (n == 2) r2 += (x[1] - center[1]) * (x[1] - center[1]);
    out[i] = norm * std::exp(-r2 / (2.0 * sigma * sigma));
  }
  return out;
}

cplx inner_product(const Field& u, const Field& v) {
  if (!u.grid().same_as(v.grid())) throw std::invalid_argument("inner_product: grid mismatch");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * std::conj(v[i]);
  return acc * u.grid().cell_volume();
}

double l2_norm(const Field& u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::norm(u[i]);
  return std::sqrt(acc * u.grid().cell_volume());
}

double sup_norm(const Field& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

std::vector<cplx> spectrum(const Field& u) {
  std::vector<cplx> spec(u.values());
  workspace_for(u.grid()).forward(spec.data());
  return spec;
}

Field from_spectrum(GridPtr grid, std::vector<cplx> spec) {
  if (spec.size() != grid->size()) throw std::invalid_argument("from_spectrum: size mismatch");
  workspace_for(*grid).backward(spec.data());
  return Field(std::move(grid), std::move(spec));
}

namespace {
// Spectral quadrature weight making sum_k w |U_k|^2 == h^n sum_x |u|^2.
double parseval_weight(const Grid& g) {
  return g.cell_volume() / static_cast<double>(g.size());
}
}  // namespace

double l2_norm_spectral(const Field& u) {
  const auto spec = spectrum(u);
  double acc = 0.0;
  for (const auto& c : spec) acc += std::norm(c);
  return std::sqrt(acc * parseval_weight(u.grid()));
}

double h1_norm(const Field& u) {
  const auto spec = spectrum(u);
  const Grid& g = u.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) acc += (1.0 + g.k_squared(i)) * std::norm(spec[i]);
  return std::sqrt(acc * parseval_weight(g));
}

double spectral_tail_fraction(const Field& u, double frac) {
  const auto spec = spectrum(u);
  const Grid& g = u.grid();
  const double cut = frac * g.kmax();
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double m = std::norm(spec[i]);
    total += m;
    const auto k = g.wavevector(i);
    if (std::abs(k[0]) >= cut || (g.dim() == 2 && std::abs(k[1]) >= cut)) tail += m;
  }
  return total > 0.0 ? tail / total : 0.0;
}

Field spectral_derivative(const Field& u, int axis) {
  if (axis < 0 || axis >= u.grid().dim())
    throw std::invalid_argument("spectral_derivative: bad axis");
  auto spec = spectrum(u);
  const Grid& g = u.grid();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto k = g.wavevector(i);
    spec[i] *= cplx{0.0, k[static_cast<std::size_t>(axis)]};
  }
  return from_spectrum(u.grid_ptr(), std::move(spec));
}

std::array<Field, 2> gradient(const Field& u) {
  std::array<Field, 2> out;
  out[0] = spectral_derivative(u, 0);
  if (u.grid().dim() == 2) out[1] = spectral_derivative(u, 1);
  return out;
}

Field apply_multiplier(const Field& u, const std::function<cplx(std::array<double, 2>)>& m) {
  auto spec = spectrum(u);
  const Grid& g = u.grid();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= m(g.wavevector(i));
  return from_spectrum(u.grid_ptr(), std::move(spec));
}

Field fractional_laplacian(const Field& u, double s) {
  auto spec = spectrum(u);
  const Grid& g = u.grid();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double k2 = g.k_squared(i);
    spec[i] *= (k2 > 0.0) ? std::pow(k2, 0.5 * s) : 0.0;
  }
  return from_spectrum(u.grid_ptr(), std::move(spec));
}

SigmaParams default_sigma_params(int dim) {
  const double s = 0.5 * dim + 0.5;
  return SigmaParams{s, 0.5 * s, 0.5 * s};
}

double sigma_norm(const Field& u, const SigmaParams& p, double tail_tol) {
  if (!(p.s > 0.5 * u.grid().dim()))
    throw std::invalid_argument("sigma_norm: requires s > n/2");
  if (std::abs(p.s1 + p.s2 - p.s) > 1e-14 || !(p.s1 > 0.0) || !(p.s2 > 0.0))
    throw std::invalid_argument("sigma_norm: requires s = s1 + s2 with 0 < s1, s2 < s");
  const double tail = spectral_tail_fraction(u);
  if (tail > tail_tol)
    throw std::runtime_error("sigma_norm: field unresolved, spectral tail fraction " +
                             std::to_string(tail));

  const Grid& g = u.grid();
  const double w = g.cell_volume();

  const Field frac_s = fractional_laplacian(u, p.s);
  double term_reg = 0.0;
  for (std::size_t i = 0; i < frac_s.size(); ++i) term_reg += std::norm(frac_s[i]);
  term_reg *= w;

  double term_weight = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto x = g.point(i);
    const double r2 = x[0] * x[0] + (g.dim() == 2 ? x[1] * x[1] : 0.0);
    term_weight += std::pow(r2, p.s) * std::norm(u[i]);  // |x|^{2s} |u|^2
  }
  term_weight *= w;

  const Field frac_s1 = fractional_laplacian(u, p.s1);
  double term_mixed = 0.0;
  for (std::size_t i = 0; i < frac_s1.size(); ++i) {
    const auto x = g.point(i);
    const double r2 = x[0] * x[0] + (g.dim() == 2 ? x[1] * x[1] : 0.0);
    term_mixed += std::pow(r2, p.s2) * std::norm(frac_s1[i]);
  }
  term_mixed *= w;

  return std::sqrt(term_reg + term_weight + term_mixed);
}

}  // namespace magscat
