#pragma once

#include <complex>
#include <vector>

#include "magscat/scattering.hpp"

namespace magscat {

// Per-amplitude pairing values q(eps) = (1/eps) (S(eps phi), psi) collected
// over a strictly decreasing amplitude ladder.
struct EpsSweep {
  std::vector<double> eps;
  std::vector<cplx> q;
  bool flagged = false;
  std::vector<ScatterDiagnostics> run_diags;
};

// Geometric ladder eps_1, eps_1*ratio, ... of length m.
std::vector<double> geometric_ladder(double eps1, double ratio, int m);

// Runs the full scattering operator (mode nonlinear_vs_free) at each ladder
// amplitude and records the pairing against psi. Throws for ladders shorter
// than 2 or not strictly decreasing.
EpsSweep sweep(const Field& phi, const Field& psi, const HamiltonianOp& ham,
               const std::vector<double>& ladder, const ScatterSpec& spec);

struct OrderFit {
  double order = 0.0;       // least-squares slope of log-residual vs log-eps
  cplx extrapolated{0, 0};  // two-point Richardson value at the fitted order
  std::vector<double> residuals;
  int points_used = 0;
};

// Fits |q(eps) - reference| ~ C eps^beta. Requires >= 4 ladder points with
// residuals above the 1e-10 numerical floor (degenerate-fit error below).
OrderFit fit_order(const EpsSweep& sw, cplx reference, double floor = 1e-10);

}  // namespace magscat
