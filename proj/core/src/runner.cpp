#include "mfg/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "mfg/io.hpp"

namespace mfg {

namespace {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

void write_history(const std::filesystem::path& path,
                   const std::vector<DiagnosticsReport>& history,
                   const std::string& hash) {
  std::ofstream os(path);
  os << DiagnosticsReport::csv_header() << "\n";
  for (const auto& r : history) os << r.csv_row(hash, kVersionString) << "\n";
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Plot the convergence history and the final density written next to
this script. Requires matplotlib."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))

iters, gaps = [], []
with open(os.path.join(here, "history.csv")) as f:
    for row in csv.DictReader(f):
        iters.append(int(row["iter"]))
        gaps.append(abs(float(row["gap_relative"])))

fig, axes = plt.subplots(1, 2, figsize=(11, 4))
axes[0].semilogy(iters, gaps)
axes[0].set_xlabel("iteration")
axes[0].set_ylabel("|relative duality gap|")
axes[0].set_title("convergence")

ts, xs, vs = [], [], []
with open(os.path.join(here, "m.csv")) as f:
    for row in csv.DictReader(f):
        ts.append(float(row["t"]))
        xs.append(float(row["x0"]))
        vs.append(float(row["value"]))
sc = axes[1].scatter(xs, ts, c=vs, s=4, cmap="viridis")
fig.colorbar(sc, ax=axes[1], label="m")
axes[1].set_xlabel("x")
axes[1].set_ylabel("t")
axes[1].set_title("density")

out = os.path.join(here, "report.png")
fig.tight_layout()
fig.savefig(out, dpi=130)
print(out)
)PY";

void write_run_outputs(const std::filesystem::path& dir, const RunConfig& cfg,
                       const SolveResult& result, const ModelSpec& model,
                       const SpaceTimeGrid& grid,
                       const std::vector<CertificateItem>& cert) {
  std::filesystem::create_directories(dir);
  write_text(dir / "config.json", cfg.to_json_text());

  const SolverState& st = result.state;
  write_field(dir / "phi.bin", grid, st.phi);
  write_field(dir / "m.bin", grid, st.m);
  write_field(dir / "w.bin", grid, st.w);
  write_field_csv(dir / "phi.csv", grid, st.phi);
  write_field_csv(dir / "m.csv", grid, st.m);
  write_field_csv(dir / "w.csv", grid, st.w);
  DensityField alpha = reconstruct_alpha(st, model, grid);
  write_field(dir / "alpha.bin", grid, alpha);
  write_field_csv(dir / "alpha.csv", grid, alpha);

  json j = json::parse(result.report.to_json());
  j["version"] = kVersionString;
  j["config_hash"] = cfg.hash();
  json cj = json::array();
  for (const auto& item : cert)
    cj.push_back({{"name", item.name},
                  {"residual", item.residual},
                  {"tolerance", item.tolerance},
                  {"pass", item.pass}});
  j["certificate"] = cj;
  write_text(dir / "report.json", j.dump(2));

  {
    std::ofstream os(dir / "report.csv");
    os << DiagnosticsReport::csv_header() << "\n"
       << result.report.csv_row(cfg.hash(), kVersionString) << "\n";
  }
  write_history(dir / "history.csv", st.history, cfg.hash());
  write_text(dir / "plot_report.py", kPlotScript);
}

}  // namespace

RunArtifacts run_single(const RunConfig& cfg,
                        const std::filesystem::path& out_root) {
  SpaceTimeGrid grid = make_grid(cfg);
  ModelSpec model = make_model(cfg, grid);

  SolveResult result = solve(model, grid, cfg.solver);
  std::vector<CertificateItem> cert = weak_solution_certificate(
      result.state.phi, result.state.m, result.state.w, model, grid, {},
      cfg.seed);

  RunArtifacts art;
  art.dir = out_root;
  art.config_hash = cfg.hash();
  art.report = result.report;
  art.certificate = cert;
  art.converged = result.state.converged;
  art.certified =
      std::all_of(cert.begin(), cert.end(),
                  [](const CertificateItem& c) { return c.pass; });
  write_run_outputs(out_root, cfg, result, model, grid, cert);
  return art;
}

SweepResult viscosity_sweep(const RunConfig& cfg,
                            const std::filesystem::path& out_root) {
  std::filesystem::create_directories(out_root);
  SweepResult sweep;
  sweep.dir = out_root;

  RunConfig base = cfg;
  base.diffusion = DiffusionPreset::Zero;
  base.epsilon = 0.0;
  SpaceTimeGrid grid = make_grid(base);
  ModelSpec base_model = make_model(base, grid);
  SolveResult base_result = solve(base_model, grid, base.solver);
  sweep.base_norm = field_norm(base_result.state.m, grid, cfg.q);

  std::vector<double> eps = cfg.sweep_epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  for (double e : eps) {
    RunConfig rc = cfg;
    rc.diffusion = DiffusionPreset::Isotropic;
    rc.epsilon = e;
    ModelSpec model = make_model(rc, grid);
    SolveResult res = solve(model, grid, rc.solver);

    DensityField diff = res.state.m;
    for (std::size_t i = 0; i < diff.v.size(); ++i)
      diff.v[i] -= base_result.state.m.v[i];

    SweepRow row;
    row.epsilon = e;
    row.distance_to_base = field_norm(diff, grid, cfg.q);
    row.gap_relative = res.report.gap_relative;
    row.converged = res.state.converged;
    row.config_hash = rc.hash();
    sweep.rows.push_back(row);
  }

  // Flag rows that break the expected vanishing-viscosity trend.
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    SweepRow& row = sweep.rows[i];
    row.flagged = !row.converged;
    if (i > 0 && row.distance_to_base >= sweep.rows[i - 1].distance_to_base)
      row.flagged = true;
  }
  const std::size_t nrows = sweep.rows.size();
  sweep.tail_decreasing =
      nrows >= 3 &&
      sweep.rows[nrows - 2].distance_to_base <
          sweep.rows[nrows - 3].distance_to_base &&
      sweep.rows[nrows - 1].distance_to_base <
          sweep.rows[nrows - 2].distance_to_base;
  sweep.within_tol =
      nrows > 0 && sweep.rows.back().distance_to_base <=
                       cfg.sweep_distance_tol * sweep.base_norm;

  std::ofstream os(out_root / "sweep.csv");
  os << "epsilon,distance_to_base,base_norm,gap_relative,converged,flagged,"
        "config_hash\n";
  os.precision(17);
  for (const SweepRow& row : sweep.rows)
    os << row.epsilon << ',' << row.distance_to_base << ',' << sweep.base_norm
       << ',' << row.gap_relative << ',' << (row.converged ? 1 : 0) << ','
       << (row.flagged ? 1 : 0) << ',' << row.config_hash << "\n";
  return sweep;
}

namespace {

SolverState prolong_state(const SolverState& coarse,
                          const SpaceTimeGrid& cg, const SpaceTimeGrid& fg) {
  const std::size_t N = fg.num_nodes();
  auto coarse_node = [&](std::size_t idx) {
    if (fg.d == 1) return idx / 2;
    return (idx / fg.n / 2) * cg.n + (idx % fg.n) / 2;
  };
  SolverState fine;
  fine.phi = ScalarField(fg.nt + 1, N);
  for (std::size_t k = 0; k <= fg.nt; ++k) {
    const std::size_t ck = std::min(k / 2, cg.nt);
    for (std::size_t x = 0; x < N; ++x)
      fine.phi.at(k, x) = coarse.phi.at(ck, coarse_node(x));
  }
  fine.phi_bar = fine.phi;
  fine.m = DensityField(fg.nt, N);
  fine.w = FluxField(fg.nt, N, fg.d);
  for (std::size_t k = 0; k < fg.nt; ++k) {
    const std::size_t ck = std::min(k / 2, cg.nt - 1);
    for (std::size_t x = 0; x < N; ++x) {
      const std::size_t cx = coarse_node(x);
      fine.m.at(k, x) = coarse.m.at(ck, cx);
      for (std::size_t c = 0; c < fg.d; ++c)
        fine.w.at(k, x, c) = coarse.w.at(ck, cx, c);
    }
  }
  return fine;
}

}  // namespace

RefineResult refinement_study(const RunConfig& cfg,
                              const std::filesystem::path& out_root) {
  if (cfg.refine_levels < 2)
    throw std::invalid_argument("refinement study needs at least 2 levels");
  std::filesystem::create_directories(out_root);
  RefineResult out;
  out.dir = out_root;

  RunConfig level = cfg;
  SolveResult prev;
  SpaceTimeGrid prev_grid;
  for (std::size_t lvl = 0; lvl < cfg.refine_levels; ++lvl) {
    SpaceTimeGrid grid = make_grid(level);
    const std::size_t cells = (grid.nt + 1) * grid.num_nodes();
    if (cells > cfg.refine_cell_budget) break;
    ModelSpec model = make_model(level, grid);

    SolveResult res;
    if (lvl == 0) {
      res = solve(model, grid, level.solver);
    } else {
      res = solve(model, grid, level.solver,
                  prolong_state(prev.state, prev_grid, grid));
    }

    RefineRow row;
    row.n = grid.n;
    row.nt = grid.nt;
    row.gap_relative = res.report.gap_relative;
    row.converged = res.state.converged;
    row.norms = res.report.norm_table;
    if (lvl > 0) {
      DensityField coarse_up = prolong_state(prev.state, prev_grid, grid).m;
      for (std::size_t i = 0; i < coarse_up.v.size(); ++i)
        coarse_up.v[i] -= res.state.m.v[i];
      row.distance_to_coarser = field_norm(coarse_up, grid, level.q);
    }
    out.rows.push_back(row);

    prev = std::move(res);
    prev_grid = grid;
    level.n *= 2;
    level.nt *= 2;
    level.solver.max_iters *= 4;
  }

  if (out.rows.size() >= 2) {
    const auto& last = out.rows.back().norms;
    const auto& coarse = out.rows[out.rows.size() - 2].norms;
    for (const auto& [key, fine_val] : last) {
      auto it = coarse.find(key);
      if (it == coarse.end()) continue;
      if (!std::isfinite(fine_val) || !std::isfinite(it->second)) continue;
      const double denom = std::max(std::abs(fine_val), 1e-12);
      out.max_relative_change = std::max(
          out.max_relative_change, std::abs(fine_val - it->second) / denom);
    }
  }

  std::ofstream os(out_root / "refine.csv");
  os << "n,nt,gap_relative,converged,distance_to_coarser";
  if (!out.rows.empty())
    for (const auto& [key, _] : out.rows.front().norms) os << ',' << key;
  os << "\n";
  os.precision(17);
  for (const RefineRow& row : out.rows) {
    os << row.n << ',' << row.nt << ',' << row.gap_relative << ','
       << (row.converged ? 1 : 0) << ',' << row.distance_to_coarser;
    for (const auto& [_, val] : row.norms) os << ',' << val;
    os << "\n";
  }
  return out;
}

}  // namespace mfg
