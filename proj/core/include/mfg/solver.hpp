#pragma once

#include <cstdint>
#include <vector>

#include "mfg/diagnostics.hpp"
#include "mfg/grid.hpp"
#include "mfg/lambda.hpp"
#include "mfg/model.hpp"
#include "mfg/prox.hpp"

namespace mfg {

struct SolverConfig {
  std::size_t max_iters = 200000;
  double gap_tol = 1e-8;        // relative duality gap target
  double step_ratio = 1.0;      // sigma/tau balance
  double overrelax = 1.0;       // extrapolation weight theta in [1,2)
  std::size_t check_every = 100;
  std::uint64_t seed = 0;
  ProxParams prox;
};

/// PDHG iterate for the saddle problem inf_phi { F(phi) + G(Lambda phi) }.
/// alpha is never an independent iterate; it is reconstructed as f(.,m).
struct SolverState {
  ScalarField phi;
  ScalarField phi_bar;
  DensityField m;
  FluxField w;
  std::size_t iter = 0;
  double tau = 0.0;
  double sigma = 0.0;
  double opnorm = 0.0;
  bool converged = false;
  std::vector<DiagnosticsReport> history;
};

class SolverAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SolverState make_initial_state(const ModelSpec& model,
                               const SpaceTimeGrid& grid);

/// One primal-dual step: dual prox of G* on (m,w) - sigma*Lambda(phi_bar),
/// primal prox of F on phi + tau*Lambda^*(m,w), then extrapolation.
void pdhg_step(SolverState& state, const ModelSpec& model,
               const SpaceTimeGrid& grid, const SolverConfig& config);

struct SolveResult {
  SolverState state;
  DiagnosticsReport report;
};

/// Iterate until the relative duality gap reaches config.gap_tol or
/// max_iters. Non-convergence is not an error: the best iterate is
/// returned with converged = false.
SolveResult solve(const ModelSpec& model, const SpaceTimeGrid& grid,
                  const SolverConfig& config);

/// Warm-started variant; `initial` must match the grid shape.
SolveResult solve(const ModelSpec& model, const SpaceTimeGrid& grid,
                  const SolverConfig& config, SolverState initial);

/// alpha = f(., m) per the optimality equivalence.
DensityField reconstruct_alpha(const SolverState& state,
                               const ModelSpec& model,
                               const SpaceTimeGrid& grid);

/// L^p norm of the positive part of the pointwise HJ defect
/// (-a + H(x,b)) - alpha with (a,b) = Lambda(phi).
double hj_inequality_residual(const SolverState& state, const ModelSpec& model,
                              const SpaceTimeGrid& grid,
                              const DensityField& alpha);

/// Fills the full diagnostics for a state (gap, residuals, norms, Holder
/// fit where applicable).
DiagnosticsReport diagnose(const SolverState& state, const ModelSpec& model,
                           const SpaceTimeGrid& grid);

}  // namespace mfg
