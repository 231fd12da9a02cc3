#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mfg/config.hpp"
#include "mfg/io.hpp"
#include "mfg/parallel.hpp"
#include "mfg/runner.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<double> tol;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
  auto* c = cmd->add_option("--config", opts.config_path,
                            "path to a JSON run configuration");
  if (needs_config) c->required();
  cmd->add_option("--out", opts.out_dir,
                  "output directory (defaults to $MFG_OUTPUT_ROOT/<hash>)");
  cmd->add_option("--seed", opts.seed, "override the configured seed");
  cmd->add_option("--threads", opts.threads, "worker thread count");
  cmd->add_option("--tol", opts.tol, "override the solver gap tolerance");
}

mfg::RunConfig load_config(const CommonOpts& opts) {
  mfg::RunConfig cfg = mfg::RunConfig::from_file(opts.config_path);
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.solver.seed = *opts.seed;
  }
  if (opts.tol) cfg.solver.gap_tol = *opts.tol;
  if (opts.threads) mfg::set_thread_count(*opts.threads);
  return cfg;
}

fs::path resolve_out(const CommonOpts& opts, const mfg::RunConfig& cfg) {
  if (!opts.out_dir.empty()) return fs::path(opts.out_dir);
  if (!cfg.output_dir.empty()) return fs::path(cfg.output_dir);
  const char* root = std::getenv("MFG_OUTPUT_ROOT");
  fs::path base = root ? fs::path(root) : fs::current_path() / "runs";
  return base / cfg.hash();
}

void print_certificate(const std::vector<mfg::CertificateItem>& cert) {
  for (const auto& item : cert)
    std::cout << "  " << (item.pass ? "pass" : "FAIL") << "  " << item.name
              << "  residual " << item.residual << "  tol " << item.tolerance
              << "\n";
}

int cmd_validate(const CommonOpts& opts) {
  mfg::RunConfig cfg = load_config(opts);
  mfg::SpaceTimeGrid grid = mfg::make_grid(cfg);
  mfg::ModelSpec model = mfg::make_model(cfg, grid);
  const auto conj = mfg::conjugate_exponents(model);
  const auto est = mfg::estimate_exponents(grid.d, cfg.r, conj.p);
  std::cout << "config " << cfg.hash() << " valid\n"
            << "  d=" << grid.d << " n=" << grid.n << " nt=" << grid.nt
            << " T=" << grid.T << "\n"
            << "  r=" << cfg.r << " r'=" << conj.r_conj << " q=" << cfg.q
            << " p=" << conj.p << "\n"
            << "  eta=" << est.eta << " gamma=" << est.gamma << "\n";
  if (est.boundary_warning)
    std::cout << "  warning: p = 1 + d/r, integral estimates degenerate\n";
  if (conj.growth_violation)
    std::cout << "  warning: growth condition r >= p violated with "
                 "nonzero diffusion; results are outside the certified "
                 "regime\n";
  return 0;
}

int cmd_solve(const CommonOpts& opts) {
  mfg::RunConfig cfg = load_config(opts);
  const fs::path out = resolve_out(opts, cfg);
  mfg::RunArtifacts art = mfg::run_single(cfg, out);
  std::cout << "run " << art.config_hash << " -> " << art.dir.string() << "\n"
            << "  converged " << (art.converged ? "yes" : "NO")
            << "  gap_rel " << art.report.gap_relative << "  iters "
            << art.report.iter << "\n";
  print_certificate(art.certificate);
  if (!art.converged) return 2;
  return art.certified ? 0 : 3;
}

int cmd_sweep(const CommonOpts& opts) {
  mfg::RunConfig cfg = load_config(opts);
  const fs::path out = resolve_out(opts, cfg);
  mfg::SweepResult sweep = mfg::viscosity_sweep(cfg, out);
  std::cout << "sweep -> " << sweep.dir.string() << "\n";
  for (const auto& row : sweep.rows)
    std::cout << "  eps " << row.epsilon << "  dist "
              << row.distance_to_base << (row.flagged ? "  [flagged]" : "")
              << "\n";
  std::cout << "  base norm " << sweep.base_norm << "  tail decreasing "
            << (sweep.tail_decreasing ? "yes" : "NO") << "  within tol "
            << (sweep.within_tol ? "yes" : "NO") << "\n";
  return (sweep.tail_decreasing && sweep.within_tol) ? 0 : 2;
}

int cmd_refine(const CommonOpts& opts) {
  mfg::RunConfig cfg = load_config(opts);
  const fs::path out = resolve_out(opts, cfg);
  mfg::RefineResult ref = mfg::refinement_study(cfg, out);
  std::cout << "refine -> " << ref.dir.string() << "\n";
  for (const auto& row : ref.rows)
    std::cout << "  n=" << row.n << " nt=" << row.nt << "  gap_rel "
              << row.gap_relative << (row.converged ? "" : "  [stalled]")
              << "\n";
  std::cout << "  max norm change " << ref.max_relative_change << "\n";
  return ref.rows.size() >= 2 ? 0 : 2;
}

int cmd_report(const CommonOpts& opts) {
  // Recompute diagnostics from fields saved by a previous solve.
  const fs::path dir =
      opts.out_dir.empty() ? fs::current_path() : fs::path(opts.out_dir);
  mfg::RunConfig cfg =
      mfg::RunConfig::from_file((dir / "config.json").string());
  if (opts.threads) mfg::set_thread_count(*opts.threads);
  mfg::SpaceTimeGrid grid = mfg::make_grid(cfg);
  mfg::ModelSpec model = mfg::make_model(cfg, grid);

  mfg::SolverState st;
  mfg::SpaceTimeGrid g2;
  st.phi = mfg::read_scalar_field(dir / "phi.bin", g2);
  st.m = mfg::read_density_field(dir / "m.bin", g2);
  st.w = mfg::read_flux_field(dir / "w.bin", g2);
  st.phi_bar = st.phi;

  mfg::DiagnosticsReport rep = mfg::diagnose(st, model, grid);
  auto cert = mfg::weak_solution_certificate(st.phi, st.m, st.w, model, grid,
                                             {}, cfg.seed);
  std::cout << rep.to_json() << "\n";
  print_certificate(cert);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solver for degenerate mean field games via convex duality"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto* validate = app.add_subcommand("validate", "check a configuration");
  add_common(validate, opts, true);
  auto* solve = app.add_subcommand("solve", "run a single solve");
  add_common(solve, opts, true);
  auto* sweep = app.add_subcommand("sweep-viscosity",
                                   "vanishing-viscosity ladder");
  add_common(sweep, opts, true);
  auto* refine = app.add_subcommand("refine", "grid refinement study");
  add_common(refine, opts, true);
  auto* report =
      app.add_subcommand("report", "recompute diagnostics for a saved run");
  add_common(report, opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(opts);
    if (solve->parsed()) return cmd_solve(opts);
    if (sweep->parsed()) return cmd_sweep(opts);
    if (refine->parsed()) return cmd_refine(opts);
    if (report->parsed()) return cmd_report(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
