#pragma once

#include <array>
#include <complex>
#include <vector>

#include "magscat/scattering.hpp"
#include "magscat/tomography.hpp"

namespace magscat {

// Boost e^{i m xi.x}: modulus preserved pointwise, spectrum shifted by m*xi.
// Throws (naming the required N) when the boosted band m|xi| + 3/sigma
// leaves the resolved window 0.8*kmax; sigma <= 0 skips the envelope part.
Field boost(const Field& phi0, std::array<double, 2> xi, double m = 1.0, double sigma = 0.0);

// Required points-per-axis for a boosted packet on a box of half-width L.
int required_n_for_boost(double xi_mag, double sigma, double half_width, double m = 1.0);

enum class ProbeTarget { A_tangential, V };

struct ProbeGeometry {
  double sigma = 0.5;  // envelope width
  double m = 1.0;      // boost mass parameter
};

struct PairingResult {
  cplx raw{0, 0};             // (i(S_L - I) phi_xi, psi_xi)
  cplx estimate{0, 0};        // calibrated line-integral estimate
  cplx literal_scaled{0, 0};  // |xi| * raw (diagnostic)
  ScatterDiagnostics diag;
};

// High-velocity pairing along the line through s*perp(theta) with direction
// theta = (cos angle, sin angle), probe speed xi_mag. The envelope is a
// width-sigma Gaussian centered on the line (phi0 = psi0).
// Calibration of `estimate` (leading term as |xi| -> infinity):
//   A_tangential: raw itself -> smeared integral of theta.A along the line;
//   V:            -2 |xi| raw -> smeared integral of V along the line.
PairingResult pairing(double angle, double offset, double xi_mag, ProbeTarget target,
                      const HamiltonianOp& ham, const ScatterSpec& spec,
                      const ProbeGeometry& geom);

// Independent quadrature oracle for the same probe: the closed-form line
// integral smeared by the envelope marginal.
cplx pairing_oracle(double angle, double offset, ProbeTarget target,
                    const PotentialDescriptor& desc, const ProbeGeometry& geom);

// T_scat placing the packet center >= 5 potential widths past the bump at
// +-T (spec default policy).
double suggest_t_scat(double xi_mag, const ProbeGeometry& geom, const PotentialSet& pot);

enum class StabilityPolicy { per_probe, per_angle };

struct SinogramJob {
  std::vector<double> angles;
  std::vector<double> offsets;
  double xi_mag = 32.0;
  ProbeTarget target = ProbeTarget::A_tangential;
  ProbeGeometry geom;
  ScatterSpec scat;
  StabilityPolicy policy = StabilityPolicy::per_angle;
  // Probes spaced >= 7 sigma along the offset axis share one linear
  // evolution (S_L is linear; cross-talk is Gaussian-tail small).
  bool batch = true;
  int workers = 1;
};

// Scattering-derived sinogram of calibrated line-integral estimates.
// Band-limit failures are collected and thrown with the failing probes
// enumerated; flagged scattering runs set `flagged`.
struct SinogramRun {
  Sinogram sino;
  bool flagged = false;
  int flagged_runs = 0;
  double max_t_instability = 0.0;
};
SinogramRun assemble_sinogram_scattering(const HamiltonianOp& ham, const SinogramJob& job);

// Oracle-path sinogram for the same geometry (smear = envelope marginal;
// pass geom.sigma = 0 for sharp line integrals).
Sinogram assemble_sinogram_oracle(const PotentialDescriptor& desc, const std::vector<double>& angles,
                                  const std::vector<double>& offsets, ProbeTarget target,
                                  double smear_sigma);

}  // namespace magscat
