#pragma once

#include <array>
#include <cstddef>

#include "mfg/grid.hpp"
#include "mfg/model.hpp"

namespace mfg {

struct ProxParams {
  double newton_tol = 1e-12;
  std::size_t newton_max = 60;
  bool bisection_fallback = true;
};

/// One pointwise prox instance for K(a,b) = F*(x, -a + H(x,b)):
/// minimize K(a,b) + (1/2 sigma)((a-a_in)^2 + |b-b_in|^2).
struct PointwiseProblem {
  std::size_t node = 0;
  double a_in = 0.0;
  std::array<double, 2> b_in{0.0, 0.0};
  std::size_t dim = 1;
  double sigma = 1.0;
  const HamiltonianSpec* hamiltonian = nullptr;
  const CouplingSpec* coupling = nullptr;
};

struct PointwiseProxResult {
  double a = 0.0;
  std::array<double, 2> b{0.0, 0.0};
  /// Multiplier mu = (F*)'(-a + H(x,b)) >= 0; equals the dual density
  /// produced by the Moreau step.
  double mu = 0.0;
  bool converged = true;
};

/// Prox of the primal functional F(phi) = -<m0, phi(0)> + terminal
/// constraint {phi(T) = phiT}: initial slice shifts by tau*m0/dt, interior
/// slices pass through, terminal slice is set to phiT exactly.
ScalarField prox_primal(const ScalarField& phi_in, double tau,
                        const std::vector<double>& m0,
                        const std::vector<double>& phiT,
                        const SpaceTimeGrid& grid);

/// Pointwise prox of K; exact identity on the zero set
/// {-a_in + H(x,b_in) <= 0}. Radial reduction in b plus a safeguarded
/// Newton/bisection solve of the optimality system.
PointwiseProxResult prox_G_pointwise(const PointwiseProblem& prob,
                                     const ProxParams& params = {});

/// Prox of sigma*G* via the Moreau identity, applied pointwise in the
/// positive-density orientation: output m >= 0 everywhere and w = 0
/// wherever m = 0, both exact.
void prox_Gstar(const SpaceTimeGrid& grid, const ModelSpec& model,
                const DensityField& m_in, const FluxField& w_in, double sigma,
                DensityField& m_out, FluxField& w_out,
                const ProxParams& params = {});

}  // namespace mfg
