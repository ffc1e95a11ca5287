#include "magscat/amplitude_probe.hpp"

#include <cmath>
#include <stdexcept>

namespace magscat {

std::vector<double> geometric_ladder(double eps1, double ratio, int m) {
  if (!(eps1 > 0.0) || !(ratio > 0.0) || ratio >= 1.0 || m < 1)
    throw std::invalid_argument("geometric_ladder: need eps1 > 0, 0 < ratio < 1, m >= 1");
  std::vector<double> out(static_cast<std::size_t>(m));
  double e = eps1;
  for (int i = 0; i < m; ++i, e *= ratio) out[static_cast<std::size_t>(i)] = e;
  return out;
}

EpsSweep sweep(const Field& phi, const Field& psi, const HamiltonianOp& ham,
               const std::vector<double>& ladder, const ScatterSpec& spec) {
  if (ladder.size() < 2)
    throw std::invalid_argument("sweep: amplitude ladder must have at least 2 entries");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] < ladder[i - 1]))
      throw std::invalid_argument("sweep: amplitude ladder must be strictly decreasing");

  ScatterSpec s = spec;
  s.mode = ScatterMode::nonlinear_vs_free;
  s.evo.include_nonlinearity = true;

  EpsSweep out;
  out.eps = ladder;
  out.q.reserve(ladder.size());
  for (const double eps : ladder) {
    const auto run = nonlinear_S(cplx{eps, 0.0} * phi, ham, s);
    out.q.push_back(inner_product(run.phi_plus, psi) / eps);
    out.run_diags.push_back(run.diag);
    out.flagged = out.flagged || run.diag.flagged;
  }
  return out;
}

OrderFit fit_order(const EpsSweep& sw, cplx reference, double floor) {
  if (sw.eps.size() != sw.q.size() || sw.eps.empty())
    throw std::invalid_argument("fit_order: malformed sweep");
  OrderFit fit;
  fit.residuals.resize(sw.eps.size());
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < sw.eps.size(); ++i) {
    fit.residuals[i] = std::abs(sw.q[i] - reference);
    if (fit.residuals[i] > floor) {
      lx.push_back(std::log(sw.eps[i]));
      ly.push_back(std::log(fit.residuals[i]));
    }
  }
  fit.points_used = static_cast<int>(lx.size());
  if (fit.points_used < 4)
    throw std::runtime_error(
        "fit_order: fewer than 4 residuals above the numerical floor; degenerate fit");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double n = static_cast<double>(lx.size());
  fit.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  // Two-point Richardson at the fitted order, from the smallest amplitudes:
  // q(eps) = q_inf + C eps^beta.
  const std::size_t m = sw.eps.size();
  const double ea = sw.eps[m - 2], eb = sw.eps[m - 1];
  const double ra = std::pow(ea, fit.order), rb = std::pow(eb, fit.order);
  fit.extrapolated = (sw.q[m - 1] * ra - sw.q[m - 2] * rb) / (ra - rb);
  return fit;
}

}  // namespace magscat
