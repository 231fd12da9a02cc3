#pragma once

#include "mfg/grid.hpp"
#include "mfg/model.hpp"

namespace mfg {

/// Result of applying Lambda(phi) = (dphi/dt + A_ij d_ij phi, D phi).
/// Both components are interval-placed; slice k reads the k+1 node slice
/// of phi for the spatial terms.
struct LambdaImage {
  DensityField a;  // scalar part
  FluxField b;     // gradient part
};

/// Forward operator. a_k = (phi^{k+1}-phi^k)/dt + A_ij d_ij phi^{k+1},
/// b_k = D phi^{k+1} with the forward-difference periodic gradient.
LambdaImage apply_lambda(const SpaceTimeGrid& grid, const DiffusionSpec& diff,
                         const ScalarField& phi);

/// Exact Euclidean transpose of apply_lambda. Slice 0 carries -m_0/dt,
/// the interior slices the discrete continuity residual with reversed
/// sign, and slice nt the terminal coupling.
ScalarField apply_lambda_adjoint(const SpaceTimeGrid& grid,
                                 const DiffusionSpec& diff,
                                 const DensityField& m, const FluxField& w);

/// Second-order term A_ij d_ij applied to one spatial slice (centered
/// differences, centered cross terms) and its exact transpose.
void apply_second_order(const SpaceTimeGrid& grid, const DiffusionSpec& diff,
                        const double* in, double* out_add);
void apply_second_order_transpose(const SpaceTimeGrid& grid,
                                  const DiffusionSpec& diff, const double* in,
                                  double* out_add);

/// Forward-difference gradient of a spatial slice, and its transpose
/// (negative backward divergence); both add into out.
void apply_gradient(const SpaceTimeGrid& grid, const double* in,
                    double* out_add);
void apply_gradient_transpose(const SpaceTimeGrid& grid, const double* in,
                              double* out_add);

/// Inner products weighted by dt*h^d on every entry.
double inner(const SpaceTimeGrid& grid, const ScalarField& x,
             const ScalarField& y);
double inner(const SpaceTimeGrid& grid, const DensityField& x,
             const DensityField& y);
double inner(const SpaceTimeGrid& grid, const FluxField& x,
             const FluxField& y);

struct OpNormEstimate {
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Power iteration on Lambda^T Lambda; returns an estimate of the operator
/// norm of Lambda. Deterministic for a fixed seed.
OpNormEstimate opnorm_lambda(const SpaceTimeGrid& grid,
                             const DiffusionSpec& diff, std::size_t iters,
                             double tol, std::uint64_t seed = 0);

}  // namespace mfg
