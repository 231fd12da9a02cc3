#include "mfg/model.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

// -- HamiltonianSpec -----------------------------------------------------

double HamiltonianSpec::growth_constant() const {
  double kmin = cH, kmax = cH;
  for (double w : weight) {
    kmin = std::min(kmin, cH * w);
    kmax = std::max(kmax, cH * w);
  }
  return std::max({kmax, 1.0 / kmin, 1.0});
}

void HamiltonianSpec::validate(std::size_t num_nodes) const {
  if (!(r > 1.0))
    throw HypothesisError("H2", "Hamiltonian exponent must satisfy r > 1");
  if (!(cH > 0.0))
    throw HypothesisError("H2", "Hamiltonian coefficient cH must be positive");
  if (!weight.empty()) {
    if (weight.size() != num_nodes)
      throw HypothesisError("H2", "Hamiltonian weight size mismatch");
    for (double w : weight)
      if (!(w > 0.0) || !std::isfinite(w))
        throw HypothesisError("H2", "Hamiltonian weight must be positive and finite");
  }
}

double CouplingSpec::growth_constant() const {
  double kmin = cf, kmax = cf;
  for (double w : factor) {
    kmin = std::min(kmin, cf * w);
    kmax = std::max(kmax, cf * w);
  }
  return std::max({kmax, 1.0 / kmin, 1.0});
}

void CouplingSpec::validate(std::size_t num_nodes) const {
  if (!(q > 1.0))
    throw HypothesisError(
        "H1", "coupling growth requires q > 1 (f increasing in m)");
  if (!(cf > 0.0))
    throw HypothesisError("H1", "coupling coefficient cf must be positive");
  if (!factor.empty()) {
    if (factor.size() != num_nodes)
      throw HypothesisError("H1", "coupling factor size mismatch");
    for (double w : factor)
      if (!(w > 0.0) || !std::isfinite(w))
        throw HypothesisError("H1", "coupling factor must be positive and finite");
  }
}

// -- DiffusionSpec -------------------------------------------------------

DiffusionSpec DiffusionSpec::zero(std::size_t d) {
  DiffusionSpec s;
  s.kind = DiffusionKind::Zero;
  s.dim = d;
  return s;
}

DiffusionSpec DiffusionSpec::isotropic(std::size_t d, double eps) {
  DiffusionSpec s;
  s.kind = eps == 0.0 ? DiffusionKind::Zero : DiffusionKind::Isotropic;
  s.epsilon = eps;
  s.dim = d;
  return s;
}

DiffusionSpec DiffusionSpec::factored(std::size_t d, std::size_t cols,
                                      std::vector<double> sigma_values) {
  DiffusionSpec s;
  s.kind = DiffusionKind::Factored;
  s.dim = d;
  s.cols = cols;
  s.sigma = std::move(sigma_values);
  return s;
}

double DiffusionSpec::a(std::size_t node, std::size_t i, std::size_t j) const {
  switch (kind) {
    case DiffusionKind::Zero:
      return 0.0;
    case DiffusionKind::Isotropic:
      return i == j ? epsilon : 0.0;
    case DiffusionKind::Factored: {
      const double* s = sigma.data() + node * dim * cols;
      double acc = 0.0;
      for (std::size_t k = 0; k < cols; ++k)
        acc += s[i * cols + k] * s[j * cols + k];
      return acc;
    }
  }
  return 0.0;
}

double DiffusionSpec::a_sup_norm(std::size_t num_nodes) const {
  if (kind == DiffusionKind::Zero) return 0.0;
  if (kind == DiffusionKind::Isotropic) return epsilon;
  double sup = 0.0;
  for (std::size_t x = 0; x < num_nodes; ++x)
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        sup = std::max(sup, std::abs(a(x, i, j)));
  return sup;
}

void DiffusionSpec::validate(std::size_t num_nodes) const {
  if (!(epsilon >= 0.0))
    throw HypothesisError("H3", "isotropic diffusion requires epsilon >= 0");
  if (kind == DiffusionKind::Factored) {
    if (cols == 0 || sigma.size() != num_nodes * dim * cols)
      throw HypothesisError("H3", "factored diffusion Sigma size mismatch");
    for (double v : sigma)
      if (!std::isfinite(v))
        throw HypothesisError("H3", "Sigma entries must be finite");
    // A = Sigma Sigma^T is PSD by construction; nothing further to check
    // pointwise beyond finiteness.
  }
}

void ModelSpec::validate() const {
  const std::size_t num_nodes = m0.size();
  hamiltonian.validate(num_nodes);
  coupling.validate(num_nodes);
  diffusion.validate(num_nodes);
  if (!(T > 0.0)) throw HypothesisError("H4", "horizon T must be positive");
  if (m0.empty() || phiT.size() != num_nodes)
    throw HypothesisError("H4", "m0 and phiT must be sampled on the same grid");
  double mass = 0.0;
  for (double v : m0) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw HypothesisError("H4", "initial density m0 must be strictly positive");
    mass += v;
  }
  mass *= cell_volume;
  if (std::abs(mass - 1.0) > 1e-9)
    throw HypothesisError("H4", "initial density m0 must have unit mass");
  for (double v : phiT)
    if (!std::isfinite(v))
      throw HypothesisError("H4", "terminal cost phiT must be finite");
}

// -- Coupling evaluations ------------------------------------------------

double eval_f(const CouplingSpec& spec, std::size_t node, double m) {
  if (m < 0.0)
    throw std::domain_error("eval_f: negative density");
  if (m == 0.0) return 0.0;
  if (spec.q == 2.0) return spec.coeff(node) * m;
  return spec.coeff(node) * std::pow(m, spec.q - 1.0);
}

double eval_F(const CouplingSpec& spec, std::size_t node, double m) {
  if (m < 0.0) return kInf;
  if (m == 0.0) return 0.0;
  if (spec.q == 2.0) return 0.5 * spec.coeff(node) * m * m;
  return spec.coeff(node) * std::pow(m, spec.q) / spec.q;
}

// -- Exponents -----------------------------------------------------------

ConjugateExponents conjugate_exponents(const ModelSpec& spec) {
  ConjugateExponents out{};
  out.r_conj = spec.hamiltonian.conjugate_exponent();
  out.p = spec.coupling.conjugate_exponent();
  out.growth_violation =
      spec.hamiltonian.r < out.p && !spec.diffusion.is_zero();
  return out;
}

EstimateExponents estimate_exponents(std::size_t d, double r, double p) {
  EstimateExponents out{};
  const double dd = static_cast<double>(d);
  const double denom = dd - r * (p - 1.0);
  const double boundary = 1.0 + dd / r;
  if (p >= boundary) {
    out.eta = kInf;
    out.gamma = kInf;
    out.boundary_warning = (p == boundary);
    return out;
  }
  out.eta = dd * (r * (p - 1.0) + 1.0) / denom;
  out.gamma = r * p * (1.0 + dd) / denom;
  out.boundary_warning = false;
  return out;
}

}  // namespace mfg
