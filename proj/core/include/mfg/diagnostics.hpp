#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/lambda.hpp"
#include "mfg/model.hpp"

namespace mfg {

/// Certification numbers for one iterate / converged state.
struct DiagnosticsReport {
  std::size_t iter = 0;
  double primal_value = 0.0;          // A(phi, alpha)
  double dual_value = 0.0;            // B(m, w)
  double gap = 0.0;                   // A + B
  double gap_relative = 0.0;          // gap / (|A| + |B| + 1)
  double hj_residual_Lp = 0.0;        // ((-a + H(b)) - alpha)_+ in L^p
  double optimality_w_residual_L1 = 0.0;  // ||w + m DpH(., Dphi)||_1 on {m>0}
  double alpha_match = 0.0;           // ||alpha - f(.,m)||_p
  double energy_identity_residual = 0.0;
  double mass_drift = 0.0;            // max_k |int m_k - 1|
  double continuity_residual = 0.0;   // time-step form of ||Lambda^*(m,w)-source||
  double phi_lower_bound_violation = 0.0;
  double holder_exponent_fit = 0.0;
  bool holder_bound_ok = false;
  double w_integrability_norm = 0.0;  // ||w||_{r'q/(r'+q-1)}
  std::map<std::string, double> norm_table;
  bool outside_hypotheses = false;    // (CondCroiss) violated
  bool converged = false;

  std::string to_json() const;
  static std::string csv_header();
  std::string csv_row(const std::string& config_hash,
                      const std::string& version) const;
};

/// A(phi,alpha) + B(m,w) in the relaxed form; B uses the m=0 convention
/// and returns +inf when w != 0 on {m = 0}. Returns (gap, relative gap).
struct GapResult {
  double primal;
  double dual;
  double gap;
  double relative;
};

GapResult duality_gap(const ScalarField& phi, const DensityField& alpha,
                      const DensityField& m, const FluxField& w,
                      const ModelSpec& model, const SpaceTimeGrid& grid);

/// Energy identity (weak-solution item (iv)):
/// integral of m (f(m) + H*(DpH(D phi))) + terminal/initial pairings.
double energy_identity_residual(const ScalarField& phi, const DensityField& m,
                                const FluxField& w, const ModelSpec& model,
                                const SpaceTimeGrid& grid);

/// Time-step form of the continuity constraint residual
/// dt * (Lambda^*(m,w) - source) in the space-time L^1 norm.
double continuity_residual(const DensityField& m, const FluxField& w,
                           const ModelSpec& model, const SpaceTimeGrid& grid);

double mass_drift(const DensityField& m, const SpaceTimeGrid& grid);

/// Positive part of min_x phiT - C(T-t) - phi in the sup norm, with
/// C = max_x (H(x, D phiT) + A_ij d_ij phiT).
double phi_lower_bound_violation(const ScalarField& phi,
                                 const ModelSpec& model,
                                 const SpaceTimeGrid& grid);
double lower_bound_constant(const ModelSpec& model, const SpaceTimeGrid& grid);

struct CertificateItem {
  std::string name;
  double residual;
  double tolerance;
  bool pass;
};

struct WeakSolutionTolerances {
  double distributional = 1e-5;  // item (ii)
  double continuity = 1e-6;      // item (iii)
  double energy = 1e-6;          // item (iv), relative to scale
};

/// Weak-solution certificate, items (i)-(iv). Item (ii) is tested in the
/// scheme-consistent distributional pairing against random smooth
/// nonnegative test functions.
std::vector<CertificateItem> weak_solution_certificate(
    const ScalarField& phi, const DensityField& m, const FluxField& w,
    const ModelSpec& model, const SpaceTimeGrid& grid,
    const WeakSolutionTolerances& tol = {}, std::uint64_t seed = 7,
    std::size_t num_test_functions = 100);

/// Circle W1 distance between two same-mass density slices (d = 1 only):
/// min over constant shift of the integrated |F_mu - F_nu - s|, exact.
double w1_distance_1d(const std::vector<double>& mu,
                      const std::vector<double>& nu, double h);

struct HolderFit {
  double fit_exponent = 0.0;
  bool bound_ok = false;
  bool fit_done = false;
  std::vector<double> gaps;
  std::vector<double> distances;
};

/// d1(m(t), m(s)) over dyadic time gaps, log-log regression of the decay
/// exponent and the bound check against C |t-s|^{min(1/r,1/2)} with 20%
/// slack. d = 1 only.
HolderFit holder_regression(const DensityField& m, const ModelSpec& model,
                            const SpaceTimeGrid& grid, double r);

/// Norm table: ||phi_+||_{L^inf(L^eta)}, ||phi_+||_{L^gamma}, ||m||_q,
/// ||w||_{r'q/(r'+q-1)}; sup norms when eta or gamma are infinite.
std::map<std::string, double> norm_report(const ScalarField& phi,
                                          const DensityField& m,
                                          const FluxField& w,
                                          const ModelSpec& model,
                                          const SpaceTimeGrid& grid);

}  // namespace mfg
