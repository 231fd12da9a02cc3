#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "mfg/model.hpp"
#include "oracles.hpp"

using namespace mfg;

TEST_CASE("Hamiltonian closed forms, quadratic case") {
  HamiltonianSpec ham;
  ham.r = 2.0;
  ham.cH = 3.0;
  double p[2] = {0.6, -0.8};
  CHECK(eval_H(ham, 0, p, 2) == doctest::Approx(3.0 * 1.0 / 2.0));
  double g[2];
  eval_DpH(ham, 0, p, 2, g);
  CHECK(g[0] == doctest::Approx(3.0 * 0.6));
  CHECK(g[1] == doctest::Approx(3.0 * -0.8));
  double v[2] = {1.5, 0.0};
  CHECK(eval_Hstar(ham, 0, v, 2) == doctest::Approx(1.5 * 1.5 / (2.0 * 3.0)));
}

TEST_CASE("H* agrees with a brute-force Legendre transform") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::uniform_real_distribution<double> rdist(1.3, 3.5);
  for (int t = 0; t < 20; ++t) {
    HamiltonianSpec ham;
    ham.r = rdist(rng);
    ham.cH = 0.5 + std::abs(unif(rng));
    double v[2] = {unif(rng), unif(rng)};
    const double exact = eval_Hstar(ham, 0, v, 2);
    const double brute = oracle::brute_hstar(ham, 0, v, 2, 25.0);
    CHECK(brute == doctest::Approx(exact).epsilon(2e-3));
  }
  for (int t = 0; t < 20; ++t) {
    HamiltonianSpec ham;
    ham.r = rdist(rng);
    ham.cH = 0.5 + std::abs(unif(rng));
    double v[1] = {unif(rng)};
    const double exact = eval_Hstar(ham, 0, v, 1);
    const double brute = oracle::brute_hstar(ham, 0, v, 1, 25.0);
    CHECK(brute == doctest::Approx(exact).epsilon(2e-3));
  }
}

TEST_CASE("Fenchel-Young identity holds at the gradient") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  std::uniform_real_distribution<double> rdist(1.2, 4.0);
  for (int t = 0; t < 200; ++t) {
    HamiltonianSpec ham;
    ham.r = rdist(rng);
    ham.cH = 0.1 + std::abs(unif(rng));
    double p[2] = {unif(rng), unif(rng)};
    double v[2];
    eval_DpH(ham, 0, p, 2, v);
    const double lhs = eval_H(ham, 0, p, 2) + eval_Hstar(ham, 0, v, 2);
    const double rhs = p[0] * v[0] + p[1] * v[1];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("coupling conjugate pair") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.01, 5.0);
  std::uniform_real_distribution<double> qdist(1.2, 4.0);
  for (int t = 0; t < 200; ++t) {
    CouplingSpec cpl;
    cpl.q = qdist(rng);
    cpl.cf = unif(rng);
    const double m = unif(rng);
    const double a = eval_f(cpl, 0, m);
    // Fenchel equality F(m) + F*(f(m)) = m f(m).
    CHECK(eval_F(cpl, 0, m) + eval_Fstar(cpl, 0, a) ==
          doctest::Approx(m * a).epsilon(1e-11));
    // (F*)' inverts f.
    CHECK(eval_Fstar_deriv(cpl, 0, a) == doctest::Approx(m).epsilon(1e-11));
    // Second derivative by finite differences.
    const double da = 1e-6 * std::max(1.0, std::abs(a));
    const double fd =
        (eval_Fstar_deriv(cpl, 0, a + da) - eval_Fstar_deriv(cpl, 0, a - da)) /
        (2.0 * da);
    CHECK(eval_Fstar_deriv2(cpl, 0, a) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("domain conventions") {
  CouplingSpec cpl;
  CHECK(eval_F(cpl, 0, -0.5) == kInf);
  CHECK(eval_Fstar(cpl, 0, -2.0) == 0.0);
  CHECK(eval_Fstar(cpl, 0, 0.0) == 0.0);
  CHECK(eval_Fstar_deriv(cpl, 0, -1.0) == 0.0);
  CHECK_THROWS_AS(eval_f(cpl, 0, -1e-12), std::domain_error);
  HamiltonianSpec ham;
  ham.r = 1.5;
  double z[2] = {0.0, 0.0};
  double g[2];
  eval_DpH(ham, 0, z, 2, g);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(eval_H(ham, 0, z, 2) == 0.0);
}

TEST_CASE("hypothesis validation rejects bad data") {
  HamiltonianSpec ham;
  ham.r = 1.0;
  CHECK_THROWS_AS(ham.validate(4), HypothesisError);
  ham.r = 2.0;
  ham.cH = -1.0;
  CHECK_THROWS_AS(ham.validate(4), HypothesisError);

  CouplingSpec cpl;
  cpl.q = 0.5;
  try {
    cpl.validate(4);
    CHECK(false);
  } catch (const HypothesisError& e) {
    CHECK(e.hypothesis() == "H1");
  }

  ModelSpec model;
  model.m0 = {1.0, 1.0, 1.0, 1.0};
  model.phiT = {0.0, 0.0, 0.0, 0.0};
  model.cell_volume = 0.25;
  model.diffusion = DiffusionSpec::zero(1);
  CHECK_NOTHROW(model.validate());
  model.m0[2] = 0.0;  // zero initial density is outside the hypotheses
  CHECK_THROWS_AS(model.validate(), HypothesisError);
  model.m0 = {2.0, 1.0, 1.0, 0.5};  // mass = 1 required
  CHECK_THROWS_AS(model.validate(), HypothesisError);
}

TEST_CASE("factored diffusion matches Sigma Sigma^T") {
  // Two nodes, d = 2, Sigma a 2x1 column.
  std::vector<double> sig = {1.0, 2.0, 0.5, -0.5};
  DiffusionSpec diff = DiffusionSpec::factored(2, 1, sig);
  CHECK(diff.a(0, 0, 0) == doctest::Approx(1.0));
  CHECK(diff.a(0, 0, 1) == doctest::Approx(2.0));
  CHECK(diff.a(0, 1, 1) == doctest::Approx(4.0));
  CHECK(diff.a(1, 0, 1) == doctest::Approx(-0.25));
  CHECK(diff.a(1, 0, 1) == diff.a(1, 1, 0));
  CHECK(diff.a_sup_norm(2) == doctest::Approx(4.0));
}

TEST_CASE("integral estimate exponents") {
  // d = 2, r = 2, p = 1.5: eta = 2*(2*0.5+1)/(2-1) = 4,
  // gamma = 2*1.5*3/(2-1) = 9.
  auto e = estimate_exponents(2, 2.0, 1.5);
  CHECK(e.eta == doctest::Approx(4.0));
  CHECK(e.gamma == doctest::Approx(9.0));
  CHECK_FALSE(e.boundary_warning);
  // d = 1, r = 2, p = 2 = 1 + d/r + 1/2: above the boundary.
  auto e2 = estimate_exponents(1, 2.0, 2.0);
  CHECK(e2.eta == kInf);
  CHECK(e2.gamma == kInf);
  CHECK_FALSE(e2.boundary_warning);
  // exactly at the boundary p = 1 + d/r
  auto e3 = estimate_exponents(1, 2.0, 1.5);
  CHECK(e3.eta == kInf);
  CHECK(e3.boundary_warning);
}

TEST_CASE("growth condition flag") {
  ModelSpec model;
  model.m0 = {1.0, 1.0, 1.0, 1.0};
  model.phiT = {0.0, 0.0, 0.0, 0.0};
  model.cell_volume = 0.25;
  model.hamiltonian.r = 1.5;
  model.coupling.q = 3.0;  // p = 1.5, r >= p holds
  model.diffusion = DiffusionSpec::isotropic(1, 0.1);
  CHECK_FALSE(conjugate_exponents(model).growth_violation);
  model.coupling.q = 1.5;  // p = 3 > r with diffusion on
  CHECK(conjugate_exponents(model).growth_violation);
  model.diffusion = DiffusionSpec::zero(1);  // degenerate case is exempt
  CHECK_FALSE(conjugate_exponents(model).growth_violation);
}
