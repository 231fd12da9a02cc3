#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "mfg/config.hpp"
#include "mfg/io.hpp"
#include "mfg/parallel.hpp"
#include "mfg/solver.hpp"

using namespace mfg;

namespace {

// Uniform density, zero terminal cost: phi = T - t, m = 1, w = 0 solves
// the system exactly and is a fixed point of the iteration.
void make_uniform(std::size_t n, std::size_t nt, SpaceTimeGrid& grid,
                  ModelSpec& model) {
  grid = SpaceTimeGrid{1, n, nt, 1.0};
  model = ModelSpec{};
  model.diffusion = DiffusionSpec::zero(1);
  model.m0.assign(n, 1.0);
  model.phiT.assign(n, 0.0);
  model.cell_volume = grid.cell_volume();
}

SolverState exact_uniform_state(const SpaceTimeGrid& grid) {
  SolverState st;
  st.phi = ScalarField(grid.nt + 1, grid.n);
  for (std::size_t k = 0; k <= grid.nt; ++k) {
    const double v = grid.T - static_cast<double>(k) * grid.dt();
    for (std::size_t x = 0; x < grid.n; ++x) st.phi.at(k, x) = v;
  }
  st.phi_bar = st.phi;
  st.m = DensityField(grid.nt, grid.n, 1.0);
  st.w = FluxField(grid.nt, grid.n, 1, 0.0);
  return st;
}

}  // namespace

TEST_CASE("uniform solution is a fixed point of one iteration") {
  SpaceTimeGrid grid;
  ModelSpec model;
  make_uniform(32, 16, grid, model);
  SolverConfig config;
  SolverState st = exact_uniform_state(grid);
  st.sigma = 0.05;
  st.tau = 0.05;
  SolverState before = st;
  pdhg_step(st, model, grid, config);
  double worst = 0.0;
  for (std::size_t i = 0; i < st.phi.v.size(); ++i)
    worst = std::max(worst, std::abs(st.phi.v[i] - before.phi.v[i]));
  for (std::size_t i = 0; i < st.m.v.size(); ++i)
    worst = std::max(worst, std::abs(st.m.v[i] - before.m.v[i]));
  for (std::size_t i = 0; i < st.w.v.size(); ++i)
    worst = std::max(worst, std::abs(st.w.v[i] - before.w.v[i]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("solve reaches the uniform solution from the default start") {
  SpaceTimeGrid grid;
  ModelSpec model;
  make_uniform(32, 32, grid, model);
  SolverConfig config;
  config.gap_tol = 1e-10;
  config.max_iters = 50000;
  SolveResult res = solve(model, grid, config);
  REQUIRE(res.state.converged);
  CHECK(std::abs(res.report.gap) <= 1e-8);
  for (std::size_t k = 0; k < grid.nt; ++k)
    for (std::size_t x = 0; x < grid.n; ++x) {
      CHECK(std::abs(res.state.m.at(k, x) - 1.0) <= 1e-6);
      CHECK(std::abs(res.state.w.at(k, x, 0)) <= 1e-8);
    }
  for (std::size_t k = 0; k <= grid.nt; ++k) {
    const double expect = grid.T - static_cast<double>(k) * grid.dt();
    for (std::size_t x = 0; x < grid.n; ++x)
      CHECK(std::abs(res.state.phi.at(k, x) - expect) <= 1e-6);
  }
}

TEST_CASE("alpha reconstruction is the coupling of the density") {
  SpaceTimeGrid grid;
  ModelSpec model;
  make_uniform(16, 8, grid, model);
  model.coupling.q = 3.0;
  model.coupling.cf = 2.0;
  SolverState st = exact_uniform_state(grid);
  st.m.at(2, 5) = 4.0;
  DensityField alpha = reconstruct_alpha(st, model, grid);
  CHECK(alpha.at(0, 0) == doctest::Approx(2.0));
  CHECK(alpha.at(2, 5) == doctest::Approx(2.0 * 16.0));
}

TEST_CASE("iteration is bitwise deterministic across thread counts") {
  RunConfig cfg = gaussbump_1d_config();
  cfg.n = 32;
  cfg.nt = 32;
  cfg.solver.max_iters = 300;
  cfg.solver.gap_tol = 0.0;  // run the full budget
  SpaceTimeGrid grid = make_grid(cfg);
  ModelSpec model = make_model(cfg, grid);

  set_thread_count(1);
  SolveResult a = solve(model, grid, cfg.solver);
  set_thread_count(8);
  SolveResult b = solve(model, grid, cfg.solver);
  set_thread_count(1);

  REQUIRE(a.state.phi.v.size() == b.state.phi.v.size());
  for (std::size_t i = 0; i < a.state.phi.v.size(); ++i)
    CHECK(a.state.phi.v[i] == b.state.phi.v[i]);
  for (std::size_t i = 0; i < a.state.m.v.size(); ++i)
    CHECK(a.state.m.v[i] == b.state.m.v[i]);
  for (std::size_t i = 0; i < a.state.w.v.size(); ++i)
    CHECK(a.state.w.v[i] == b.state.w.v[i]);
  CHECK(a.report.gap == b.report.gap);
}

TEST_CASE("two random warm starts agree at the optimum") {
  RunConfig cfg = gaussbump_1d_config();
  cfg.n = 32;
  cfg.nt = 32;
  cfg.solver.gap_tol = 1e-7;
  cfg.solver.max_iters = 100000;
  SpaceTimeGrid grid = make_grid(cfg);
  ModelSpec model = make_model(cfg, grid);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 0.3);
  SolveResult runs[2];
  for (int t = 0; t < 2; ++t) {
    SolverState init = make_initial_state(model, grid);
    for (std::size_t k = 0; k < grid.nt; ++k)  // keep the terminal slice
      for (std::size_t x = 0; x < grid.n; ++x)
        init.phi.at(k, x) += gauss(rng);
    for (double& v : init.m.v) v = std::max(0.0, v + gauss(rng));
    for (double& v : init.w.v) v += gauss(rng);
    runs[t] = solve(model, grid, cfg.solver, std::move(init));
    REQUIRE(runs[t].state.converged);
  }
  // unique minimizer: densities agree in L2, phi agrees where m > 0
  double l2 = 0.0;
  for (std::size_t i = 0; i < runs[0].state.m.v.size(); ++i) {
    const double d = runs[0].state.m.v[i] - runs[1].state.m.v[i];
    l2 += d * d;
  }
  l2 = std::sqrt(l2 * grid.cell_weight());
  CHECK(l2 <= 1e-4);
  for (std::size_t k = 0; k < grid.nt; ++k)
    for (std::size_t x = 0; x < grid.n; ++x)
      if (runs[0].state.m.at(k, x) > 1e-3 &&
          runs[1].state.m.at(k, x) > 1e-3)
        CHECK(std::abs(runs[0].state.phi.at(k + 1, x) -
                       runs[1].state.phi.at(k + 1, x)) <= 1e-3);
}

TEST_CASE("bump solve matches the committed reference density") {
  RunConfig cfg = gaussbump_1d_config();
  SpaceTimeGrid grid = make_grid(cfg);
  ModelSpec model = make_model(cfg, grid);
  cfg.solver.gap_tol = 1e-7;
  SolveResult res = solve(model, grid, cfg.solver);
  REQUIRE(res.state.converged);

  SpaceTimeGrid gref;
  DensityField mref = read_density_field(
      std::string(MFG_TEST_DATA_DIR) + "/bump_reference_m.bin", gref);
  REQUIRE(gref.n == grid.n);
  REQUIRE(gref.nt == grid.nt);
  double l2 = 0.0;
  for (std::size_t i = 0; i < mref.v.size(); ++i) {
    const double d = mref.v[i] - res.state.m.v[i];
    l2 += d * d;
  }
  l2 = std::sqrt(l2 * grid.cell_weight());
  CHECK(l2 <= 1e-4);
}

TEST_CASE("non-convergence returns the best iterate without throwing") {
  RunConfig cfg = gaussbump_1d_config();
  cfg.n = 16;
  cfg.nt = 16;
  cfg.solver.max_iters = 10;
  cfg.solver.check_every = 5;
  SpaceTimeGrid grid = make_grid(cfg);
  ModelSpec model = make_model(cfg, grid);
  SolveResult res = solve(model, grid, cfg.solver);
  CHECK_FALSE(res.state.converged);
  CHECK(res.state.iter == 10);
  CHECK(std::isfinite(res.report.gap));
}

TEST_CASE("history records the gap trajectory") {
  SpaceTimeGrid grid;
  ModelSpec model;
  make_uniform(16, 8, grid, model);
  SolverConfig config;
  config.gap_tol = 1e-10;
  config.check_every = 10;
  config.max_iters = 20000;
  SolveResult res = solve(model, grid, config);
  REQUIRE(res.state.converged);
  REQUIRE(res.state.history.size() >= 2);
  CHECK(std::abs(res.state.history.back().gap_relative) <= 1e-10);
  CHECK(res.state.history.front().iter == 10);
}
