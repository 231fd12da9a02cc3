#include "mfg/lambda.hpp"

#include <cmath>
#include <cstdint>
#include <random>

#include "mfg/parallel.hpp"

namespace mfg {

void apply_second_order(const SpaceTimeGrid& grid, const DiffusionSpec& diff,
                        const double* in, double* out_add) {
  if (diff.is_zero()) return;
  const std::size_t N = grid.num_nodes();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  for (std::size_t x = 0; x < N; ++x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.d; ++i) {
      const double aii = diff.a(x, i, i);
      if (aii != 0.0) {
        const std::size_t xp = grid.shift(x, i, +1);
        const std::size_t xm = grid.shift(x, i, -1);
        acc += aii * (in[xp] - 2.0 * in[x] + in[xm]) * inv_h2;
      }
    }
    if (grid.d == 2) {
      const double a01 = diff.a(x, 0, 1);
      if (a01 != 0.0) {
        const std::size_t pp = grid.shift(grid.shift(x, 0, +1), 1, +1);
        const std::size_t pm = grid.shift(grid.shift(x, 0, +1), 1, -1);
        const std::size_t mp = grid.shift(grid.shift(x, 0, -1), 1, +1);
        const std::size_t mm = grid.shift(grid.shift(x, 0, -1), 1, -1);
        // A_01 d_01 + A_10 d_10 = 2 A_01 d_01
        acc += 2.0 * a01 * (in[pp] - in[pm] - in[mp] + in[mm]) * 0.25 * inv_h2;
      }
    }
    out_add[x] += acc;
  }
}

void apply_second_order_transpose(const SpaceTimeGrid& grid,
                                  const DiffusionSpec& diff, const double* in,
                                  double* out_add) {
  if (diff.is_zero()) return;
  const std::size_t N = grid.num_nodes();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  // Transpose of the gather stencil: coefficient of the neighbor y in
  // (L^T m)(x) is the coefficient with which x appears in (L phi)(y).
  for (std::size_t x = 0; x < N; ++x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.d; ++i) {
      const std::size_t xp = grid.shift(x, i, +1);
      const std::size_t xm = grid.shift(x, i, -1);
      acc += (diff.a(xp, i, i) * in[xp] - 2.0 * diff.a(x, i, i) * in[x] +
              diff.a(xm, i, i) * in[xm]) *
             inv_h2;
    }
    if (grid.d == 2) {
      const std::size_t pp = grid.shift(grid.shift(x, 0, +1), 1, +1);
      const std::size_t pm = grid.shift(grid.shift(x, 0, +1), 1, -1);
      const std::size_t mp = grid.shift(grid.shift(x, 0, -1), 1, +1);
      const std::size_t mm = grid.shift(grid.shift(x, 0, -1), 1, -1);
      acc += 2.0 * 0.25 * inv_h2 *
             (diff.a(pp, 0, 1) * in[pp] - diff.a(pm, 0, 1) * in[pm] -
              diff.a(mp, 0, 1) * in[mp] + diff.a(mm, 0, 1) * in[mm]);
    }
    out_add[x] += acc;
  }
}

void apply_gradient(const SpaceTimeGrid& grid, const double* in,
                    double* out_add) {
  const std::size_t N = grid.num_nodes();
  const double inv_h = 1.0 / grid.h();
  for (std::size_t x = 0; x < N; ++x)
    for (std::size_t i = 0; i < grid.d; ++i) {
      const std::size_t xp = grid.shift(x, i, +1);
      out_add[x * grid.d + i] += (in[xp] - in[x]) * inv_h;
    }
}

void apply_gradient_transpose(const SpaceTimeGrid& grid, const double* in,
                              double* out_add) {
  const std::size_t N = grid.num_nodes();
  const double inv_h = 1.0 / grid.h();
  for (std::size_t x = 0; x < N; ++x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.d; ++i) {
      const std::size_t xm = grid.shift(x, i, -1);
      acc += (in[xm * grid.d + i] - in[x * grid.d + i]) * inv_h;
    }
    out_add[x] += acc;
  }
}

LambdaImage apply_lambda(const SpaceTimeGrid& grid, const DiffusionSpec& diff,
                         const ScalarField& phi) {
  const std::size_t N = grid.num_nodes();
  LambdaImage out;
  out.a = DensityField(grid.nt, N);
  out.b = FluxField(grid.nt, N, grid.d);
  const double inv_dt = 1.0 / grid.dt();
  parallel_for(grid.nt, [&](std::size_t k) {
    const double* lo = phi.slice(k);
    const double* hi = phi.slice(k + 1);
    double* a = out.a.slice(k);
    for (std::size_t x = 0; x < N; ++x) a[x] = (hi[x] - lo[x]) * inv_dt;
    apply_second_order(grid, diff, hi, a);
    apply_gradient(grid, hi, out.b.v.data() + k * N * grid.d);
  });
  return out;
}

ScalarField apply_lambda_adjoint(const SpaceTimeGrid& grid,
                                 const DiffusionSpec& diff,
                                 const DensityField& m, const FluxField& w) {
  const std::size_t N = grid.num_nodes();
  ScalarField out(grid.nt + 1, N);
  const double inv_dt = 1.0 / grid.dt();
  // Slice 0 only couples to the time difference of interval 0.
  {
    const double* m0 = m.slice(0);
    double* o = out.slice(0);
    for (std::size_t x = 0; x < N; ++x) o[x] = -m0[x] * inv_dt;
  }
  parallel_for(grid.nt, [&](std::size_t j1) {
    const std::size_t j = j1 + 1;  // output slices 1..nt
    const double* mj = m.slice(j - 1);
    double* o = out.slice(j);
    if (j < grid.nt) {
      const double* mnext = m.slice(j);
      for (std::size_t x = 0; x < N; ++x) o[x] = (mj[x] - mnext[x]) * inv_dt;
    } else {
      for (std::size_t x = 0; x < N; ++x) o[x] = mj[x] * inv_dt;
    }
    apply_second_order_transpose(grid, diff, mj, o);
    apply_gradient_transpose(grid, w.v.data() + (j - 1) * N * grid.d, o);
  });
  return out;
}

namespace {

double dot_weighted(const std::vector<double>& x, const std::vector<double>& y,
                    double weight) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc * weight;
}

}  // namespace

double inner(const SpaceTimeGrid& grid, const ScalarField& x,
             const ScalarField& y) {
  return dot_weighted(x.v, y.v, grid.cell_weight());
}

double inner(const SpaceTimeGrid& grid, const DensityField& x,
             const DensityField& y) {
  return dot_weighted(x.v, y.v, grid.cell_weight());
}

double inner(const SpaceTimeGrid& grid, const FluxField& x,
             const FluxField& y) {
  return dot_weighted(x.v, y.v, grid.cell_weight());
}

OpNormEstimate opnorm_lambda(const SpaceTimeGrid& grid,
                             const DiffusionSpec& diff, std::size_t iters,
                             double tol, std::uint64_t seed) {
  const std::size_t N = grid.num_nodes();
  ScalarField v(grid.nt + 1, N);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& x : v.v) x = dist(rng);

  OpNormEstimate est;
  double prev = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    LambdaImage img = apply_lambda(grid, diff, v);
    ScalarField u = apply_lambda_adjoint(grid, diff, img.a, img.b);
    double nrm = 0.0;
    for (double x : u.v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) {
      est.value = 0.0;
      est.converged = true;
      est.iterations = it + 1;
      return est;
    }
    for (std::size_t i = 0; i < u.v.size(); ++i) v.v[i] = u.v[i] / nrm;
    // Rayleigh quotient of Lambda^T Lambda is nrm after normalization of
    // the previous iterate, so sqrt gives the singular value.
    const double cur = std::sqrt(nrm);
    est.value = cur;
    est.iterations = it + 1;
    if (it > 0 && std::abs(cur - prev) <= tol * cur) {
      est.converged = true;
      return est;
    }
    prev = cur;
  }
  return est;
}

}  // namespace mfg
