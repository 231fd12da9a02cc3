#include <benchmark/benchmark.h>

#include <random>

#include "mfg/config.hpp"
#include "mfg/prox.hpp"
#include "mfg/solver.hpp"

using namespace mfg;

namespace {

struct Setup {
  RunConfig cfg;
  SpaceTimeGrid grid;
  ModelSpec model;
  Setup(std::size_t n, std::size_t nt) : cfg(gaussbump_1d_config()) {
    cfg.n = n;
    cfg.nt = nt;
    grid = make_grid(cfg);
    model = make_model(cfg, grid);
  }
};

void bench_apply_lambda(benchmark::State& state) {
  Setup s(static_cast<std::size_t>(state.range(0)),
          static_cast<std::size_t>(state.range(0)));
  ScalarField phi(s.grid.nt + 1, s.grid.num_nodes(), 0.3);
  for (auto _ : state) {
    LambdaImage img = apply_lambda(s.grid, s.model.diffusion, phi);
    benchmark::DoNotOptimize(img.a.v.data());
  }
  state.SetItemsProcessed(state.iterations() * s.grid.nt *
                          s.grid.num_nodes());
}
BENCHMARK(bench_apply_lambda)->Arg(64)->Arg(128)->Arg(256);

void bench_prox_pointwise(benchmark::State& state) {
  HamiltonianSpec ham;
  ham.r = 1.7;
  CouplingSpec cpl;
  cpl.q = 2.3;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> un(-1.5, 1.5);
  std::vector<PointwiseProblem> probs(1024);
  for (auto& p : probs) {
    p.dim = 1;
    p.sigma = 0.7;
    p.a_in = un(rng);
    p.b_in = {std::abs(un(rng)), 0.0};
    p.hamiltonian = &ham;
    p.coupling = &cpl;
  }
  std::size_t i = 0;
  for (auto _ : state) {
    auto res = prox_G_pointwise(probs[i]);
    benchmark::DoNotOptimize(res.a);
    i = (i + 1) & 1023;
  }
}
BENCHMARK(bench_prox_pointwise);

void bench_pdhg_step(benchmark::State& state) {
  Setup s(static_cast<std::size_t>(state.range(0)),
          static_cast<std::size_t>(state.range(0)));
  SolverState st = make_initial_state(s.model, s.grid);
  st.opnorm = opnorm_lambda(s.grid, s.model.diffusion, 200, 1e-6, 1).value;
  st.sigma = 1.0 / st.opnorm;
  st.tau = 1.0 / st.opnorm;
  for (auto _ : state) {
    pdhg_step(st, s.model, s.grid, s.cfg.solver);
    benchmark::DoNotOptimize(st.phi.v.data());
  }
  state.SetItemsProcessed(state.iterations() * s.grid.nt *
                          s.grid.num_nodes());
}
BENCHMARK(bench_pdhg_step)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
