#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "magscat/fft.hpp"
#include "magscat/grid.hpp"

namespace magscat {

// Complex field sampled on a Grid. Plain value type: copyable, no hidden
// state. All norms use the h^n quadrature weight.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid) : grid_(std::move(grid)), v_(grid_->size(), cplx{0.0, 0.0}) {}
  Field(GridPtr grid, std::vector<cplx> values);

  const Grid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  cplx* data() { return v_.data(); }
  const cplx* data() const { return v_.data(); }
  cplx& operator[](std::size_t i) { return v_[i]; }
  const cplx& operator[](std::size_t i) const { return v_[i]; }
  const std::vector<cplx>& values() const { return v_; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(cplx a);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(cplx a, Field f) { return f *= a; }

  bool all_finite() const;

 private:
  GridPtr grid_;
  std::vector<cplx> v_;
};

// Builds a field from a pointwise function of the spatial coordinates.
Field sample_field(GridPtr grid, const std::function<cplx(std::array<double, 2>)>& f);

// Normalized Gaussian packet (pi sigma^2)^{-n/4} exp(-|x-c|^2/(2 sigma^2)),
// unit L^2 mass on a well-resolved grid.
Field gaussian_packet(GridPtr grid, std::array<double, 2> center, double sigma);

// L^2 pairing h^n sum u conj(v); conjugate-linear in the second slot.
// Throws on grid mismatch.
cplx inner_product(const Field& u, const Field& v);

double l2_norm(const Field& u);
double sup_norm(const Field& u);
// L^2 norm evaluated from the DFT (Parseval route); agrees with l2_norm
// to roundoff on any field.
double l2_norm_spectral(const Field& u);
// Flat spectral H^1 norm: sum (1+|k|^2) |u_hat|^2.
double h1_norm(const Field& u);
// Fraction of spectral mass carried by modes with any |k_j| above
// frac*kmax. Used by resolution ("spectral tail") checks.
double spectral_tail_fraction(const Field& u, double frac = 0.85);

// Fourier-side helpers (thread-local workspace per grid shape).
std::vector<cplx> spectrum(const Field& u);                   // unnormalized DFT
Field from_spectrum(GridPtr grid, std::vector<cplx> spec);    // inverse of spectrum()
Field spectral_derivative(const Field& u, int axis);          // ik_axis multiplier
std::array<Field, 2> gradient(const Field& u);                // axes up to dim
// Applies a Fourier multiplier m(k); m receives the wavevector.
Field apply_multiplier(const Field& u, const std::function<cplx(std::array<double, 2>)>& m);
// (-Laplacian)^{s/2} as the |k|^s multiplier (k=0 mode maps to 0).
Field fractional_laplacian(const Field& u, double s);

// Weighted-regularity norm parameters: s = s1 + s2, s > n/2.
struct SigmaParams {
  double s;
  double s1;
  double s2;
};
// Minimal admissible split: s = n/2 + 1/2, s1 = s2 = s/2.
SigmaParams default_sigma_params(int dim);

// ( ||(-D)^{s/2}u||^2 + || |x|^s u ||^2 + || |x|^{s2} (-D)^{s1/2} u ||^2 )^{1/2}.
// Requires a resolved field: spectral tail below tail_tol of total mass.
double sigma_norm(const Field& u, const SigmaParams& p, double tail_tol = 1e-8);

}  // namespace magscat
