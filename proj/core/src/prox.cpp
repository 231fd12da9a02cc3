#include "mfg/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfg/parallel.hpp"

namespace mfg {

ScalarField prox_primal(const ScalarField& phi_in, double tau,
                        const std::vector<double>& m0,
                        const std::vector<double>& phiT,
                        const SpaceTimeGrid& grid) {
  ScalarField out = phi_in;
  const double scale = tau / grid.dt();
  double* first = out.slice(0);
  for (std::size_t x = 0; x < out.nodes; ++x) first[x] += scale * m0[x];
  double* last = out.slice(grid.nt);
  for (std::size_t x = 0; x < out.nodes; ++x) last[x] = phiT[x];
  return out;
}

namespace {

// Root of psi(e) = e + sigma*(F*)'(e) - target on (0, target], target > 0.
// psi is strictly increasing; safeguarded Newton with a bisection bracket.
double solve_inner(const CouplingSpec& cpl, std::size_t node, double sigma,
                   double target, const ProxParams& params, bool& ok) {
  const double tol = params.newton_tol * std::max(1.0, std::abs(target));
  double lo = 0.0, hi = target;
  double e = target;
  for (std::size_t it = 0; it < params.newton_max; ++it) {
    const double psi = e + sigma * eval_Fstar_deriv(cpl, node, e) - target;
    if (std::abs(psi) <= tol) return e;
    if (psi > 0.0)
      hi = e;
    else
      lo = e;
    const double dpsi = 1.0 + sigma * eval_Fstar_deriv2(cpl, node, e);
    double next = e - psi / dpsi;
    if (!std::isfinite(next) || next <= lo || next >= hi)
      next = 0.5 * (lo + hi);
    e = next;
  }
  if (params.bisection_fallback) {
    for (std::size_t it = 0; it < 200; ++it) {
      e = 0.5 * (lo + hi);
      const double psi = e + sigma * eval_Fstar_deriv(cpl, node, e) - target;
      if (std::abs(psi) <= tol) return e;
      if (psi > 0.0)
        hi = e;
      else
        lo = e;
    }
  }
  e = 0.5 * (lo + hi);
  ok = std::abs(e + sigma * eval_Fstar_deriv(cpl, node, e) - target) <=
       1e3 * tol;
  return e;
}

struct OuterEval {
  double chi;
  double mu;
};

OuterEval eval_outer(const HamiltonianSpec& ham, const CouplingSpec& cpl,
                     std::size_t node, double sigma, double a_in,
                     double beta_in, double beta, const ProxParams& params,
                     bool& ok) {
  const double target = eval_H_radial(ham, node, beta) - a_in;
  double mu = 0.0;
  if (target > 0.0) {
    const double e = solve_inner(cpl, node, sigma, target, params, ok);
    mu = eval_Fstar_deriv(cpl, node, e);
  }
  const double chi =
      beta + sigma * mu * eval_H_radial_deriv(ham, node, beta) - beta_in;
  return {chi, mu};
}

}  // namespace

PointwiseProxResult prox_G_pointwise(const PointwiseProblem& prob,
                                     const ProxParams& params) {
  const HamiltonianSpec& ham = *prob.hamiltonian;
  const CouplingSpec& cpl = *prob.coupling;
  const std::size_t node = prob.node;
  const double sigma = prob.sigma;

  PointwiseProxResult res;
  res.a = prob.a_in;
  res.b = prob.b_in;

  double beta_in = 0.0;
  for (std::size_t i = 0; i < prob.dim; ++i)
    beta_in += prob.b_in[i] * prob.b_in[i];
  beta_in = std::sqrt(beta_in);

  // Zero-set identity: F* vanishes on -a_in + H(b_in) <= 0 and the prox
  // is exactly the identity there.
  if (-prob.a_in + eval_H_radial(ham, node, beta_in) <= 0.0) {
    res.mu = 0.0;
    return res;
  }

  bool ok = true;
  double beta = 0.0;
  double mu = 0.0;
  if (beta_in == 0.0) {
    const double target = -prob.a_in;  // H(0) = 0
    const double e = solve_inner(cpl, node, sigma, target, params, ok);
    mu = eval_Fstar_deriv(cpl, node, e);
  } else {
    // chi(beta) = beta + sigma*mu(beta)*H'(beta) - beta_in is strictly
    // increasing with chi(0) < 0 <= chi(beta_in).
    double lo = 0.0, hi = beta_in;
    beta = beta_in;
    const double btol = params.newton_tol * std::max(1.0, beta_in);
    bool solved = false;
    for (std::size_t it = 0; it < params.newton_max; ++it) {
      OuterEval ev = eval_outer(ham, cpl, node, sigma, prob.a_in, beta_in,
                                beta, params, ok);
      mu = ev.mu;
      if (std::abs(ev.chi) <= btol) {
        solved = true;
        break;
      }
      if (ev.chi > 0.0)
        hi = beta;
      else
        lo = beta;
      // Newton step on chi; derivative assembled from the inner solve
      // sensitivity d mu/d beta = F''* H' / (1 + sigma F''*).
      const double target = eval_H_radial(ham, node, beta) - prob.a_in;
      const double e =
          target > 0.0
              ? target - sigma * mu  // e + sigma*mu = target at the root
              : target;
      const double f2 = eval_Fstar_deriv2(cpl, node, e);
      const double hp = eval_H_radial_deriv(ham, node, beta);
      const double hpp = eval_H_radial_deriv2(ham, node, beta);
      const double ratio =
          std::isfinite(f2) ? f2 / (1.0 + sigma * f2) : 1.0 / sigma;
      double dchi = 1.0 + sigma * (ratio * hp * hp + mu * hpp);
      double next = beta - ev.chi / dchi;
      if (!std::isfinite(next) || next <= lo || next >= hi)
        next = 0.5 * (lo + hi);
      beta = next;
    }
    if (!solved && params.bisection_fallback) {
      for (std::size_t it = 0; it < 200 && !solved; ++it) {
        beta = 0.5 * (lo + hi);
        OuterEval ev = eval_outer(ham, cpl, node, sigma, prob.a_in, beta_in,
                                  beta, params, ok);
        mu = ev.mu;
        if (std::abs(ev.chi) <= btol) solved = true;
        else if (ev.chi > 0.0)
          hi = beta;
        else
          lo = beta;
      }
    }
    if (!solved) {
      OuterEval ev = eval_outer(ham, cpl, node, sigma, prob.a_in, beta_in,
                                beta, params, ok);
      mu = ev.mu;
      ok = ok && std::abs(ev.chi) <= 1e3 * btol;
    }
  }

  res.mu = mu;
  res.a = prob.a_in + sigma * mu;
  if (beta_in > 0.0) {
    const double scale = beta / beta_in;
    for (std::size_t i = 0; i < prob.dim; ++i) res.b[i] = prob.b_in[i] * scale;
  } else {
    res.b = {0.0, 0.0};
  }
  res.converged = ok;
  return res;
}

void prox_Gstar(const SpaceTimeGrid& grid, const ModelSpec& model,
                const DensityField& m_in, const FluxField& w_in, double sigma,
                DensityField& m_out, FluxField& w_out,
                const ProxParams& params) {
  const std::size_t N = grid.num_nodes();
  if (m_out.v.size() != m_in.v.size()) m_out = DensityField(grid.nt, N);
  if (w_out.v.size() != w_in.v.size()) w_out = FluxField(grid.nt, N, grid.d);
  const double inv_sigma = 1.0 / sigma;
  parallel_for(grid.nt, [&](std::size_t k) {
    for (std::size_t x = 0; x < N; ++x) {
      PointwiseProblem prob;
      prob.node = x;
      prob.dim = grid.d;
      prob.sigma = inv_sigma;
      prob.a_in = -m_in.at(k, x) * inv_sigma;
      const double* wv = w_in.node(k, x);
      for (std::size_t i = 0; i < grid.d; ++i) prob.b_in[i] = -wv[i] * inv_sigma;
      prob.hamiltonian = &model.hamiltonian;
      prob.coupling = &model.coupling;
      PointwiseProxResult r = prox_G_pointwise(prob, params);
      if (!r.converged)
        throw std::runtime_error("prox_Gstar: pointwise solve failed");
      // Moreau identity in the positive orientation: the multiplier is the
      // new density, and the flux closes as -mu * DpH(x, b).
      m_out.at(k, x) = r.mu;
      double beta = 0.0;
      for (std::size_t i = 0; i < grid.d; ++i) beta += r.b[i] * r.b[i];
      beta = std::sqrt(beta);
      double* wo = w_out.node(k, x);
      if (r.mu == 0.0 || beta == 0.0) {
        for (std::size_t i = 0; i < grid.d; ++i) wo[i] = 0.0;
      } else {
        const double scale =
            -r.mu * eval_H_radial_deriv(model.hamiltonian, x, beta) / beta;
        for (std::size_t i = 0; i < grid.d; ++i) wo[i] = scale * r.b[i];
      }
    }
  });
}

}  // namespace mfg
