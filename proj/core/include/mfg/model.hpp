#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfg {

/// Thrown when a model or config violates one of the structural hypotheses
/// (H1)-(H4). The message names the violated hypothesis.
class HypothesisError : public std::runtime_error {
 public:
  HypothesisError(std::string hypothesis, const std::string& what)
      : std::runtime_error("[" + hypothesis + "] " + what),
        hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const { return hypothesis_; }

 private:
  std::string hypothesis_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Power-law Hamiltonian H(x,p) = weight(x) * cH * |p|^r / r with r > 1.
/// An empty weight vector means weight == 1 everywhere.
struct HamiltonianSpec {
  double r = 2.0;
  double cH = 1.0;
  std::vector<double> weight;  // per node, optional

  double conjugate_exponent() const { return r / (r - 1.0); }
  double coeff(std::size_t node) const {
    return weight.empty() ? cH : cH * weight[node];
  }
  /// Constant C2 in the two-sided growth bounds for H and H*.
  double growth_constant() const;
  void validate(std::size_t num_nodes) const;
};

/// Power-law coupling f(x,m) = cf * factor(x) * m^(q-1), primitive
/// F(x,m) = cf(x) m^q / q for m >= 0 and +inf for m < 0.
struct CouplingSpec {
  double q = 2.0;
  double cf = 1.0;
  std::vector<double> factor;  // per node, optional

  double conjugate_exponent() const { return q / (q - 1.0); }
  double coeff(std::size_t node) const {
    return factor.empty() ? cf : cf * factor[node];
  }
  double growth_constant() const;
  void validate(std::size_t num_nodes) const;
};

enum class DiffusionKind { Zero, Isotropic, Factored };

/// Diffusion matrix A(x) = Sigma(x) Sigma(x)^T, possibly degenerate.
/// Factored stores Sigma row-major per node as a d x cols matrix.
struct DiffusionSpec {
  DiffusionKind kind = DiffusionKind::Zero;
  double epsilon = 0.0;                // Isotropic: A = epsilon * I
  std::size_t dim = 1;                 // spatial dimension d
  std::size_t cols = 0;                // column count D of Sigma
  std::vector<double> sigma;           // Factored: num_nodes * dim * cols

  static DiffusionSpec zero(std::size_t d);
  static DiffusionSpec isotropic(std::size_t d, double eps);
  static DiffusionSpec factored(std::size_t d, std::size_t cols,
                                std::vector<double> sigma_values);

  bool is_zero() const { return kind == DiffusionKind::Zero; }
  /// Entry A_ij(x); i, j < dim.
  double a(std::size_t node, std::size_t i, std::size_t j) const;
  /// max_x max_ij |A_ij(x)| over the sampled nodes.
  double a_sup_norm(std::size_t num_nodes) const;
  void validate(std::size_t num_nodes) const;
};

/// Full problem data: Hamiltonian, coupling, diffusion, horizon and
/// initial/terminal conditions sampled on the spatial grid.
struct ModelSpec {
  HamiltonianSpec hamiltonian;
  CouplingSpec coupling;
  DiffusionSpec diffusion;
  double T = 1.0;
  std::vector<double> m0;    // initial density, per node
  std::vector<double> phiT;  // terminal cost, per node
  double cell_volume = 0.0;  // h^d of the sampling grid

  void validate() const;
};

// -- Hamiltonian family --------------------------------------------------
// All evaluations live in the header so the pointwise prox loop inlines
// them; the quadratic case (r == 2, q == 2) avoids pow entirely.

/// Scalar (radial) version used by the pointwise prox: H as a function of
/// |p|, plus derivatives in the radius.
inline double eval_H_radial(const HamiltonianSpec& spec, std::size_t node,
                            double rho) {
  if (rho == 0.0) return 0.0;
  const double k = spec.coeff(node);
  if (spec.r == 2.0) return 0.5 * k * rho * rho;
  return k * std::pow(rho, spec.r) / spec.r;
}

inline double eval_H_radial_deriv(const HamiltonianSpec& spec,
                                  std::size_t node, double rho) {
  if (rho <= 0.0) return 0.0;
  const double k = spec.coeff(node);
  if (spec.r == 2.0) return k * rho;
  return k * std::pow(rho, spec.r - 1.0);
}

inline double eval_H_radial_deriv2(const HamiltonianSpec& spec,
                                   std::size_t node, double rho) {
  if (spec.r == 2.0) return spec.coeff(node);
  if (rho <= 0.0) return spec.r > 2.0 ? 0.0 : kInf;
  return spec.coeff(node) * (spec.r - 1.0) * std::pow(rho, spec.r - 2.0);
}

namespace detail {
inline double norm2(const double* p, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += p[i] * p[i];
  return std::sqrt(s);
}
}  // namespace detail

inline double eval_H(const HamiltonianSpec& spec, std::size_t node,
                     const double* p, std::size_t d) {
  return eval_H_radial(spec, node, detail::norm2(p, d));
}

inline double eval_Hstar(const HamiltonianSpec& spec, std::size_t node,
                         const double* v, std::size_t d) {
  const double rho = detail::norm2(v, d);
  if (rho == 0.0) return 0.0;
  const double k = spec.coeff(node);
  if (spec.r == 2.0) return 0.5 * rho * rho / k;
  const double rc = spec.conjugate_exponent();
  return std::pow(k, -1.0 / (spec.r - 1.0)) * std::pow(rho, rc) / rc;
}

inline void eval_DpH(const HamiltonianSpec& spec, std::size_t node,
                     const double* p, std::size_t d, double* out) {
  const double rho = detail::norm2(p, d);
  if (rho == 0.0) {
    for (std::size_t i = 0; i < d; ++i) out[i] = 0.0;
    return;
  }
  const double scale =
      spec.r == 2.0 ? spec.coeff(node)
                    : spec.coeff(node) * std::pow(rho, spec.r - 2.0);
  for (std::size_t i = 0; i < d; ++i) out[i] = scale * p[i];
}

// -- Coupling family -----------------------------------------------------

double eval_f(const CouplingSpec& spec, std::size_t node, double m);
/// F(x,m); returns +inf for m < 0 (never clamps).
double eval_F(const CouplingSpec& spec, std::size_t node, double m);

/// F*(x,a); identically 0 for a <= 0.
inline double eval_Fstar(const CouplingSpec& spec, std::size_t node,
                         double a) {
  if (a <= 0.0) return 0.0;
  const double c = spec.coeff(node);
  if (spec.q == 2.0) return 0.5 * a * a / c;
  const double p = spec.conjugate_exponent();
  return std::pow(c, 1.0 - p) * std::pow(a, p) / p;
}

/// d/da F*(x,a) = f^{-1}(x,a) for a > 0, 0 otherwise.
inline double eval_Fstar_deriv(const CouplingSpec& spec, std::size_t node,
                               double a) {
  if (a <= 0.0) return 0.0;
  const double c = spec.coeff(node);
  if (spec.q == 2.0) return a / c;
  return std::pow(a / c, 1.0 / (spec.q - 1.0));
}

inline double eval_Fstar_deriv2(const CouplingSpec& spec, std::size_t node,
                                double a) {
  if (a <= 0.0) return 0.0;
  const double c = spec.coeff(node);
  if (spec.q == 2.0) return 1.0 / c;
  const double p = spec.conjugate_exponent();
  return (p - 1.0) * std::pow(c, 1.0 - p) * std::pow(a, p - 2.0);
}

// -- Exponent bookkeeping ------------------------------------------------

struct ConjugateExponents {
  double r_conj;              // r' with 1/r + 1/r' = 1
  double p;                   // conjugate of q
  bool growth_violation;      // true when r < p and diffusion is not Zero
};

ConjugateExponents conjugate_exponents(const ModelSpec& spec);

struct EstimateExponents {
  double eta;
  double gamma;
  bool boundary_warning;  // p == 1 + d/r, excluded by the estimate
};

/// Integral-estimate exponents: eta = d(r(p-1)+1)/(d-r(p-1)) and
/// gamma = rp(1+d)/(d-r(p-1)) when p < 1+d/r, both infinite otherwise.
EstimateExponents estimate_exponents(std::size_t d, double r, double p);

}  // namespace mfg
