#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "magscat/field.hpp"
#include "magscat/potentials.hpp"

namespace magscat {

// Time-stepping parameters for the split-step evolution of
//   d/dt u = i (H + V) u - i |u|^{p-1} u,   H = Laplacian + 2iA.grad + i(div A) - |A|^2.
// Strang splitting (order fixed at 2): exact Fourier kinetic half-steps
// around one classical RK4 stage for the remainder + nonlinearity.
struct EvolutionSpec {
  double dt = 1e-3;
  double total_time = 1.0;  // may be negative (backward evolution)
  double p = 3.0;           // nonlinearity exponent, > 1
  bool include_nonlinearity = true;
  bool include_v = true;
  int checkpoint_stride = 0;  // steps between stored snapshots; 0 = none
  int series_stride = 0;      // steps between conservation samples; 0 = none
  bool corrupt_div_sign = false;  // fault-injection hook for the verify suite
};

class HamiltonianOp {
 public:
  HamiltonianOp(GridPtr grid, PotentialPtr pot, bool include_v = true);

  const Grid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  const PotentialPtr& potential() const { return pot_; }
  bool include_v() const { return include_v_; }
  bool has_a() const { return pot_ && pot_->has_a(); }
  bool has_v() const { return include_v_ && pot_ && pot_->has_v(); }

  // Full generator used by the linear propagator: H u (+ V u when enabled).
  Field apply(const Field& u) const;

 private:
  GridPtr grid_;
  PotentialPtr pot_;
  bool include_v_;
};

// Exact free propagator e^{itH0}, H0 = Laplacian: Fourier multiplier
// e^{-i t |k|^2}. Unitary to roundoff.
Field free_propagate(const Field& u, double t);

// Spec operation name for HamiltonianOp::apply.
Field apply_H(const Field& u, const HamiltonianOp& ham);

struct ConservationSample {
  double t;
  double mass;
  double energy;
};

struct EvolveResult {
  Field u;
  int steps = 0;
  bool cfl_warning = false;
  bool p_regime_warning = false;  // p <= 1 + 2/n
  std::vector<std::pair<double, Field>> checkpoints;
  std::vector<ConservationSample> series;
};

// Strang-split evolution over spec.total_time. Throws std::invalid_argument
// for dt*kmax^2 > 10 and std::runtime_error (with the step index) if the
// state turns non-finite.
EvolveResult evolve(const Field& u0, const HamiltonianOp& ham, const EvolutionSpec& spec);

struct ConservedQuantities {
  double mass;
  double energy;
};

// mass = ||u||_{L2}^2; energy = int 1/2 |(grad + iA)u|^2 - 1/2 V |u|^2
//        + |u|^{p+1}/(p+1) dx.
ConservedQuantities conserved_quantities(const Field& u, const HamiltonianOp& ham, double p);

}  // namespace magscat
