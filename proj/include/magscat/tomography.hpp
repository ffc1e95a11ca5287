#pragma once

#include <complex>
#include <string>
#include <vector>

#include "magscat/field.hpp"
#include "magscat/potentials.hpp"

namespace magscat {

// Parallel-beam X-ray samples over (angle, offset). Lines are
// x(tau) = s * perp(theta) + tau * theta with theta = (cos a, sin a) and
// perp(theta) = (-sin a, cos a); angles cover [0, pi) uniformly.
struct Sinogram {
  std::vector<double> angles;   // n_theta values in [0, pi)
  std::vector<double> offsets;  // uniform, odd count, symmetric about 0
  std::vector<cplx> values;     // n_theta x n_s, row-major
  std::string provenance;       // "oracle" | "scattering"
  std::string target;           // "A_tangential" | "V" | "scalar"
  double xi_mag = 0.0;          // probe speed for scattering-derived data
  double smear_sigma = 0.0;     // envelope width folded into the values (0 = sharp)

  std::size_t n_theta() const { return angles.size(); }
  std::size_t n_s() const { return offsets.size(); }
  cplx& at(std::size_t ia, std::size_t is) { return values[ia * offsets.size() + is]; }
  cplx at(std::size_t ia, std::size_t is) const { return values[ia * offsets.size() + is]; }
  void validate() const;  // uniform spacings, odd n_s, finite values
};

std::vector<double> uniform_angles(int n_theta);
std::vector<double> uniform_offsets(int n_s, double l_s);  // n_s odd, covers [-l_s, l_s]

// Closed-form line integral of one Gaussian bump over the (angle, offset)
// line, optionally convolved in offset with the probe-envelope kernel
// N(0, sigma^2/2) (sigma = envelope width; 0 = none).
double bump_line_integral(const GaussianBump& b, double angle, double offset,
                          double smear_sigma = 0.0);

// Forward X-ray transform of a scalar bump sum (descriptor path).
Sinogram xray_forward(const std::vector<GaussianBump>& bumps, const std::vector<double>& angles,
                      const std::vector<double>& offsets, double smear_sigma = 0.0);

// Forward X-ray transform of grid samples: bilinear interpolation along the
// line with step h/2, zero outside the box. Throws if the offsets fail to
// cover the sampled support.
Sinogram xray_forward(const Field& f, const std::vector<double>& angles,
                      const std::vector<double>& offsets);
Sinogram xray_forward(const std::vector<double>& real_samples, GridPtr grid,
                      const std::vector<double>& angles, const std::vector<double>& offsets);

// Tangential oracle: sum_j theta_j * Xray[A_j] from the descriptor.
Sinogram tangential_oracle(const PotentialDescriptor& desc, const std::vector<double>& angles,
                           const std::vector<double>& offsets, double smear_sigma = 0.0);

struct ReconGrid {
  GridPtr grid;
  std::vector<double> values;
  double imag_residue = 0.0;      // ||Im sino|| / ||Re sino||, logged then dropped
  bool imag_flag = false;         // residue above 10%
  double noise_amplification = 0.0;  // b-field route only
  std::vector<std::string> notes;
};

// Filtered backprojection with a Hann-apodized ramp filter. Requires
// n_theta >= 16 (throws below); uses the real part of the sinogram.
ReconGrid fbp_invert(const Sinogram& sino, GridPtr out_grid);

// Recovers B_12 from a tangential-A sinogram: spectral d/ds, negate, FBP.
// Requires n_s >= 65; throws when the derivative's noise amplification
// factor exceeds 10.
ReconGrid b_field_from_tangential(const Sinogram& sino_tan, GridPtr out_grid);

struct TargetError {
  std::string name;
  double rel_l2 = 0.0;
  double max_abs = 0.0;
};

struct ReconstructionReport {
  std::vector<TargetError> targets;
};

// Error metrics of reconstructions against the ground-truth PotentialSet.
// `targets` names select among "V", "A1", "A2", "B". Throws on grid mismatch.
ReconstructionReport reconstruction_report(const PotentialSet& truth,
                                           const std::vector<std::pair<std::string, ReconGrid>>& recons);

// Relative L2 / max-abs distance between a reconstruction and reference
// samples on the same grid.
TargetError field_error(const std::string& name, const std::vector<double>& recon,
                        const std::vector<double>& truth, const Grid& grid);

}  // namespace magscat
