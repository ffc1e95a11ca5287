#pragma once

#include <optional>
#include <string>
#include <vector>

#include "magscat/propagator.hpp"

namespace magscat {

enum class ScatterMode { linear, nonlinear_vs_h, nonlinear_vs_free };

// Finite-horizon realization of the asymptotic limits: outputs are accepted
// when re-running with T -> t_check_factor * T moves them by less than
// tol_t in relative L^2.
struct ScatterSpec {
  double t_scat = 1.0;
  EvolutionSpec evo;
  ScatterMode mode = ScatterMode::linear;
  double tol_t = 1e-6;
  double t_check_factor = 1.25;
  bool run_t_check = true;
  double delta_smallness = 0.0;  // H^1 smallness radius; 0 disables the warning
};

struct ScatterDiagnostics {
  bool flagged = false;  // any condition below failed
  bool t_stable = true;
  double t_stability_rel = 0.0;
  double overlap_in = 0.0;   // potential-support mass overlap of u(-T)
  double overlap_out = 0.0;  // ... of u(+T)
  double mass_in = 0.0;
  double mass_out = 0.0;
  bool smallness_warning = false;
  std::vector<std::string> notes;
};

struct ScatterResult {
  Field phi_plus;
  ScatterDiagnostics diag;
};

// W-: U_H(0 <- -T) e^{-i T H0};  W+: U_H(0 <- +T) e^{+i T H0}.
// sign = -1 or +1 selects the limit direction.
ScatterResult wave_operator(const Field& phi, int sign, const HamiltonianOp& ham,
                            const ScatterSpec& spec);

// Adjoint wave operator W_sign^*: e^{-i sign T H0} U_H(sign T <- 0).
Field wave_operator_adjoint(const Field& phi, int sign, const HamiltonianOp& ham,
                            const ScatterSpec& spec);

// S_L = W+^* W- realized as e^{-iTH0} U_H(2T) e^{-iTH0}.
ScatterResult linear_S(const Field& phi, const HamiltonianOp& ham, const ScatterSpec& spec);

// Nonlinear scattering operator phi- -> phi+. The comparison group G is the
// full linear magnetic flow (nonlinear_vs_h) or the free flow
// (nonlinear_vs_free): u(-T) = e^{-iTG} phi-, nonlinear evolution to +T,
// phi+ = e^{-iTG} u(+T).
ScatterResult nonlinear_S(const Field& phi_minus, const HamiltonianOp& ham,
                          const ScatterSpec& spec);

// Picard iteration on the Duhamel integral equation
//   u(t) = e^{itH} phi- - i int_{-T}^t e^{i(t-tau)H} |u|^{p-1}u(tau) dtau
// on uniform quadrature nodes (trapezoidal rule); phi+ recovered from the
// converged trajectory endpoint.
struct PicardSpec {
  double t_span = 2.0;   // nodes cover [-t_span, +t_span]
  double dt_quad = 0.02;
  EvolutionSpec evo;     // inner transport steps (nonlinearity ignored)
  int max_iters = 25;
  double tol = 1e-12;    // absolute L^2 tolerance on successive differences
};

class PicardDivergence : public std::runtime_error {
 public:
  PicardDivergence(std::string msg, std::vector<double> ratios)
      : std::runtime_error(std::move(msg)), ratio_history(std::move(ratios)) {}
  std::vector<double> ratio_history;
};

struct PicardResult {
  std::vector<double> node_times;
  std::vector<Field> trajectory;
  Field phi_plus;
  std::vector<double> contraction_ratios;  // successive-difference ratios
  double final_update = 0.0;
  double residual = 0.0;  // integral-equation defect, sup over nodes
  bool converged = false;
  bool flagged = false;  // set when contraction was never observed
  int iterations = 0;
};

PicardResult picard_solve(const Field& phi_minus, const HamiltonianOp& ham,
                          const PicardSpec& spec);

// Largest phi-amplitude scale with first-iteration contraction ratio <= 0.5,
// found by bisection on multiples of phi. Used to place smallness ladders.
double calibrate_delta(const Field& phi, const HamiltonianOp& ham, const PicardSpec& spec,
                       double ratio_target = 0.5);

struct NormEquivalenceReport {
  double h1_minus = 0.0;
  double h1_plus = 0.0;
  double ratio = 0.0;           // h1_plus / h1_minus (flat spectral norm)
  double magnetic_ratio = 0.0;  // same with ||u||^2 + ||(grad+iA)u||^2
};

NormEquivalenceReport norm_equivalence_check(const Field& phi_minus, const Field& phi_plus,
                                             const HamiltonianOp& ham);

}  // namespace magscat
