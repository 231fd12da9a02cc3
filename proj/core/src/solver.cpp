#include "mfg/solver.hpp"

#include <algorithm>
#include <cmath>

#include "mfg/parallel.hpp"

namespace mfg {

SolverState make_initial_state(const ModelSpec& model,
                               const SpaceTimeGrid& grid) {
  const std::size_t N = grid.num_nodes();
  SolverState st;
  st.phi = ScalarField(grid.nt + 1, N);
  for (std::size_t k = 0; k <= grid.nt; ++k)
    std::copy(model.phiT.begin(), model.phiT.end(), st.phi.slice(k));
  st.phi_bar = st.phi;
  st.m = DensityField(grid.nt, N);
  for (std::size_t k = 0; k < grid.nt; ++k)
    std::copy(model.m0.begin(), model.m0.end(), st.m.slice(k));
  st.w = FluxField(grid.nt, N, grid.d);
  return st;
}

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

void pdhg_step(SolverState& state, const ModelSpec& model,
               const SpaceTimeGrid& grid, const SolverConfig& config) {
  const std::size_t N = grid.num_nodes();

  // Dual update. The stored pair (m,w) is the sign-flipped dual variable,
  // so the ascent step enters with a minus sign.
  LambdaImage img = apply_lambda(grid, model.diffusion, state.phi_bar);
  DensityField m_tilde(grid.nt, N);
  FluxField w_tilde(grid.nt, N, grid.d);
  for (std::size_t i = 0; i < m_tilde.v.size(); ++i)
    m_tilde.v[i] = state.m.v[i] - state.sigma * img.a.v[i];
  for (std::size_t i = 0; i < w_tilde.v.size(); ++i)
    w_tilde.v[i] = state.w.v[i] - state.sigma * img.b.v[i];
  prox_Gstar(grid, model, m_tilde, w_tilde, state.sigma, state.m, state.w,
             config.prox);

  // Primal update.
  ScalarField adj = apply_lambda_adjoint(grid, model.diffusion, state.m,
                                         state.w);
  ScalarField phi_tilde = state.phi;
  for (std::size_t i = 0; i < phi_tilde.v.size(); ++i)
    phi_tilde.v[i] += state.tau * adj.v[i];
  ScalarField phi_new =
      prox_primal(phi_tilde, state.tau, model.m0, model.phiT, grid);

  // Extrapolation.
  const double theta = config.overrelax;
  for (std::size_t i = 0; i < phi_new.v.size(); ++i)
    state.phi_bar.v[i] =
        phi_new.v[i] + theta * (phi_new.v[i] - state.phi.v[i]);
  state.phi = std::move(phi_new);
  ++state.iter;

  if (!all_finite(state.phi.v) || !all_finite(state.m.v) ||
      !all_finite(state.w.v))
    throw SolverAbort("pdhg_step: non-finite field at iteration " +
                      std::to_string(state.iter));
}

DensityField reconstruct_alpha(const SolverState& state,
                               const ModelSpec& model,
                               const SpaceTimeGrid& grid) {
  const std::size_t N = grid.num_nodes();
  DensityField alpha(grid.nt, N);
  for (std::size_t k = 0; k < grid.nt; ++k)
    for (std::size_t x = 0; x < N; ++x)
      alpha.at(k, x) = eval_f(model.coupling, x, state.m.at(k, x));
  return alpha;
}

double hj_inequality_residual(const SolverState& state, const ModelSpec& model,
                              const SpaceTimeGrid& grid,
                              const DensityField& alpha) {
  LambdaImage img = apply_lambda(grid, model.diffusion, state.phi);
  const std::size_t N = grid.num_nodes();
  DensityField defect(grid.nt, N);
  for (std::size_t k = 0; k < grid.nt; ++k)
    for (std::size_t x = 0; x < N; ++x) {
      const double hj =
          -img.a.at(k, x) +
          eval_H(model.hamiltonian, x, img.b.node(k, x), grid.d);
      defect.at(k, x) = std::max(0.0, hj - alpha.at(k, x));
    }
  return field_norm(defect, grid, model.coupling.conjugate_exponent());
}

DiagnosticsReport diagnose(const SolverState& state, const ModelSpec& model,
                           const SpaceTimeGrid& grid) {
  DiagnosticsReport rep;
  rep.iter = state.iter;
  rep.converged = state.converged;

  DensityField alpha = reconstruct_alpha(state, model, grid);
  const GapResult g =
      duality_gap(state.phi, alpha, state.m, state.w, model, grid);
  rep.primal_value = g.primal;
  rep.dual_value = g.dual;
  rep.gap = g.gap;
  rep.gap_relative = g.relative;
  rep.hj_residual_Lp = hj_inequality_residual(state, model, grid, alpha);
  rep.alpha_match = 0.0;  // alpha is f(.,m) by construction
  rep.energy_identity_residual =
      energy_identity_residual(state.phi, state.m, state.w, model, grid);
  rep.mass_drift = mass_drift(state.m, grid);
  rep.continuity_residual =
      continuity_residual(state.m, state.w, model, grid);
  rep.phi_lower_bound_violation =
      phi_lower_bound_violation(state.phi, model, grid);
  rep.outside_hypotheses = conjugate_exponents(model).growth_violation;

  // ||w + m DpH(., D phi)||_1 on {m > 0}.
  {
    LambdaImage img = apply_lambda(grid, model.diffusion, state.phi);
    const std::size_t N = grid.num_nodes();
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.nt; ++k)
      for (std::size_t x = 0; x < N; ++x) {
        const double mv = state.m.at(k, x);
        if (mv <= 0.0) continue;
        double dph[2];
        eval_DpH(model.hamiltonian, x, img.b.node(k, x), grid.d, dph);
        double s2 = 0.0;
        for (std::size_t i = 0; i < grid.d; ++i) {
          const double e = state.w.at(k, x, i) + mv * dph[i];
          s2 += e * e;
        }
        acc += std::sqrt(s2);
      }
    rep.optimality_w_residual_L1 = acc * grid.cell_weight();
  }

  rep.norm_table = norm_report(state.phi, state.m, state.w, model, grid);
  const auto exps = conjugate_exponents(model);
  rep.w_integrability_norm =
      field_norm(state.w, grid,
                 exps.r_conj * model.coupling.q /
                     (exps.r_conj + model.coupling.q - 1.0));
  if (grid.d == 1 && grid.nt >= 16) {
    try {
      HolderFit fit =
          holder_regression(state.m, model, grid, model.hamiltonian.r);
      rep.holder_exponent_fit = fit.fit_exponent;
      rep.holder_bound_ok = fit.bound_ok;
    } catch (const std::invalid_argument&) {
      rep.holder_bound_ok = false;
    }
  }
  return rep;
}

SolveResult solve(const ModelSpec& model, const SpaceTimeGrid& grid,
                  const SolverConfig& config) {
  return solve(model, grid, config, make_initial_state(model, grid));
}

SolveResult solve(const ModelSpec& model, const SpaceTimeGrid& grid,
                  const SolverConfig& config, SolverState initial) {
  model.validate();
  grid.validate();

  SolverState state = std::move(initial);
  state.iter = 0;
  state.converged = false;
  state.history.clear();
  state.phi_bar = state.phi;
  OpNormEstimate est =
      opnorm_lambda(grid, model.diffusion, 500, 1e-9, config.seed);
  // tau*sigma*L^2 <= 1 with a 5% safety margin.
  const double L = est.value * std::sqrt(1.05);
  state.opnorm = est.value;
  state.sigma = config.step_ratio / L;
  state.tau = 1.0 / (config.step_ratio * L);

  DensityField alpha;
  while (state.iter < config.max_iters) {
    pdhg_step(state, model, grid, config);
    if (state.iter % config.check_every == 0 ||
        state.iter == config.max_iters) {
      alpha = reconstruct_alpha(state, model, grid);
      const GapResult g =
          duality_gap(state.phi, alpha, state.m, state.w, model, grid);
      DiagnosticsReport snap;
      snap.iter = state.iter;
      snap.primal_value = g.primal;
      snap.dual_value = g.dual;
      snap.gap = g.gap;
      snap.gap_relative = g.relative;
      snap.mass_drift = mass_drift(state.m, grid);
      snap.continuity_residual =
          continuity_residual(state.m, state.w, model, grid);
      state.history.push_back(snap);
      if (std::isfinite(g.relative) &&
          std::abs(g.relative) <= config.gap_tol) {
        state.converged = true;
        break;
      }
    }
  }

  SolveResult out;
  out.state = std::move(state);
  out.report = diagnose(out.state, model, grid);
  out.report.converged = out.state.converged;
  return out;
}

}  // namespace mfg
