// Independent reference implementations used only by the tests. These
// deliberately avoid the library's operator and prox code paths: dense
// matrix assembly, brute-force searches and a small eigensolver.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/lambda.hpp"
#include "mfg/model.hpp"

namespace oracle {

// Dense matrix of the space-time operator Lambda by probing unit vectors.
// Rows are the stacked (a, b) image entries, columns the phi entries.
inline std::vector<std::vector<double>> dense_lambda(
    const mfg::SpaceTimeGrid& grid, const mfg::DiffusionSpec& diff) {
  const std::size_t N = grid.num_nodes();
  const std::size_t ncols = (grid.nt + 1) * N;
  const std::size_t nrows = grid.nt * N * (1 + grid.d);
  std::vector<std::vector<double>> M(nrows, std::vector<double>(ncols, 0.0));
  for (std::size_t c = 0; c < ncols; ++c) {
    mfg::ScalarField e(grid.nt + 1, N);
    e.v[c] = 1.0;
    mfg::LambdaImage img = mfg::apply_lambda(grid, diff, e);
    std::size_t row = 0;
    for (std::size_t k = 0; k < grid.nt; ++k)
      for (std::size_t x = 0; x < N; ++x) {
        M[row++][c] = img.a.at(k, x);
        for (std::size_t i = 0; i < grid.d; ++i)
          M[row++][c] = img.b.at(k, x, i);
      }
  }
  return M;
}

// Apply the transpose of a dense matrix (plain Euclidean transpose; the
// uniform cell weight cancels between the two inner products).
inline std::vector<double> dense_transpose_apply(
    const std::vector<std::vector<double>>& M, const std::vector<double>& y) {
  const std::size_t ncols = M.empty() ? 0 : M.front().size();
  std::vector<double> out(ncols, 0.0);
  for (std::size_t r = 0; r < M.size(); ++r)
    for (std::size_t c = 0; c < ncols; ++c) out[c] += M[r][c] * y[r];
  return out;
}

// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double jacobi_max_eigenvalue(std::vector<std::vector<double>> A,
                                    std::size_t sweeps = 60) {
  const std::size_t n = A.size();
  for (std::size_t s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += A[i][j] * A[i][j];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(A[p][q]) < 1e-18) continue;
        const double theta = 0.5 * std::atan2(2.0 * A[p][q], A[q][q] - A[p][p]);
        const double c = std::cos(theta), t = std::sin(theta);
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = A[k][p], akq = A[k][q];
          A[k][p] = c * akp - t * akq;
          A[k][q] = t * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = A[p][k], aqk = A[q][k];
          A[p][k] = c * apk - t * aqk;
          A[q][k] = t * apk + c * aqk;
        }
      }
  }
  double lam = A[0][0];
  for (std::size_t i = 1; i < n; ++i) lam = std::max(lam, A[i][i]);
  return lam;
}

// Operator norm of Lambda via the dense Gram matrix Lambda^T Lambda.
inline double dense_opnorm(const mfg::SpaceTimeGrid& grid,
                           const mfg::DiffusionSpec& diff) {
  const auto M = dense_lambda(grid, diff);
  const std::size_t n = M.empty() ? 0 : M.front().size();
  std::vector<std::vector<double>> G(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < M.size(); ++r)
    for (std::size_t i = 0; i < n; ++i) {
      if (M[r][i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) G[i][j] += M[r][i] * M[r][j];
    }
  return std::sqrt(std::max(0.0, jacobi_max_eigenvalue(std::move(G))));
}

// Brute-force Legendre transform sup_p (v.p - H(p)) over a polar grid.
inline double brute_hstar(const mfg::HamiltonianSpec& ham, std::size_t node,
                          const double* v, std::size_t d, double radius,
                          std::size_t nr = 4000, std::size_t na = 256) {
  double best = 0.0;
  if (d == 1) {
    for (std::size_t i = 0; i <= nr; ++i) {
      const double p = -radius + 2.0 * radius * i / nr;
      best = std::max(best, v[0] * p - mfg::eval_H(ham, node, &p, 1));
    }
  } else {
    for (std::size_t a = 0; a < na; ++a) {
      const double th = 2.0 * M_PI * a / na;
      for (std::size_t i = 1; i <= nr; ++i) {
        const double rho = radius * i / nr;
        double p[2] = {rho * std::cos(th), rho * std::sin(th)};
        best = std::max(best, v[0] * p[0] + v[1] * p[1] -
                                  mfg::eval_H(ham, node, p, 2));
      }
    }
  }
  return best;
}

// Two-stage grid search for the pointwise prox objective
//   F*(x, -a + H(x,b)) + (1/(2 sigma)) ((a - a_in)^2 + |b - b_in|^2)
// with the radial reduction b = beta * b_in/|b_in| (valid by symmetry).
// Returns (a, beta) after refining the search window several times.
struct GridSearchProx {
  double a;
  double beta;
  double value;
};

inline double prox_objective(const mfg::HamiltonianSpec& ham,
                             const mfg::CouplingSpec& cpl, std::size_t node,
                             double sigma, double a_in, double beta_in,
                             double a, double beta) {
  const double arg = -a + mfg::eval_H_radial(ham, node, beta);
  const double da = a - a_in, db = beta - beta_in;
  return mfg::eval_Fstar(cpl, node, arg) +
         (da * da + db * db) / (2.0 * sigma);
}

// (F*)'(arg) written out directly so the oracle does not share the
// library's evaluation code.
inline double oracle_fstar_deriv(const mfg::CouplingSpec& cpl,
                                 std::size_t node, double arg) {
  if (arg <= 0.0) return 0.0;
  return std::pow(arg / cpl.coeff(node), 1.0 / (cpl.q - 1.0));
}

// For fixed beta the partial minimizer over a solves the monotone scalar
// equation psi(a) = a - a_in - sigma (F*)'(-a + H(beta)) = 0; bisection
// gives it to machine precision.
inline double minimize_a_given_beta(const mfg::HamiltonianSpec& ham,
                                    const mfg::CouplingSpec& cpl,
                                    std::size_t node, double sigma,
                                    double a_in, double beta) {
  const double Hb = mfg::eval_H_radial(ham, node, beta);
  double lo = a_in;
  double hi = a_in + sigma * oracle_fstar_deriv(cpl, node, -a_in + Hb) + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double psi =
        mid - a_in - sigma * oracle_fstar_deriv(cpl, node, -mid + Hb);
    (psi < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// The objective reduced over a is convex in beta, so a refined grid on
// [0, beta_in] with the window recentered on the best sample always keeps
// the minimizer inside the window.
inline GridSearchProx grid_search_prox(const mfg::HamiltonianSpec& ham,
                                       const mfg::CouplingSpec& cpl,
                                       std::size_t node, double sigma,
                                       double a_in, double beta_in,
                                       std::size_t refinements = 12,
                                       std::size_t pts = 160) {
  double blo = 0.0, bhi = std::max(beta_in, 1e-30);
  GridSearchProx best{a_in, beta_in, 0.0};
  best.value = prox_objective(ham, cpl, node, sigma, a_in, beta_in,
                              minimize_a_given_beta(ham, cpl, node, sigma,
                                                    a_in, beta_in),
                              beta_in);
  best.a = minimize_a_given_beta(ham, cpl, node, sigma, a_in, beta_in);
  for (std::size_t ref = 0; ref < refinements; ++ref) {
    double ba = best.a, bb = best.beta, bv = best.value;
    for (std::size_t j = 0; j <= pts; ++j) {
      const double beta = blo + (bhi - blo) * j / pts;
      const double a =
          minimize_a_given_beta(ham, cpl, node, sigma, a_in, beta);
      const double val =
          prox_objective(ham, cpl, node, sigma, a_in, beta_in, a, beta);
      if (val < bv) {
        bv = val;
        ba = a;
        bb = beta;
      }
    }
    best = {ba, bb, bv};
    const double bw = (bhi - blo) / pts;
    blo = std::max(0.0, bb - 2.0 * bw);
    bhi = std::min(std::max(beta_in, 1e-30), bb + 2.0 * bw);
    if (bhi <= blo) bhi = blo + 1e-30;
  }
  return best;
}

// Exact circle W1 between two discrete densities: every optimal transport
// on a cycle is a constant flow offset, and some vertex of the resulting
// piecewise-linear objective is attained at an offset equal to one of the
// cumulative differences. Enumerate them all.
inline double lp_w1_circle(const std::vector<double>& mu,
                           const std::vector<double>& nu, double h) {
  const std::size_t n = mu.size();
  std::vector<double> cum(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += (mu[i] - nu[i]) * h;
    cum[i] = acc;
  }
  double best = mfg::kInf;
  for (std::size_t j = 0; j < n; ++j) {
    double tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) tot += std::abs(cum[i] - cum[j]);
    best = std::min(best, tot * h);
  }
  return best;
}

}  // namespace oracle
