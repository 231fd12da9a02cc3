#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mfg/config.hpp"
#include "mfg/diagnostics.hpp"
#include "mfg/solver.hpp"

namespace mfg {

/// One completed run with everything written under `dir`: config, fields
/// (binary and CSV), report.json / report.csv, history.csv and a plot
/// script.
struct RunArtifacts {
  std::filesystem::path dir;
  std::string config_hash;
  DiagnosticsReport report;
  std::vector<CertificateItem> certificate;
  bool converged = false;
  bool certified = false;  // all certificate items pass
};

RunArtifacts run_single(const RunConfig& cfg,
                        const std::filesystem::path& out_root);

struct SweepRow {
  double epsilon = 0.0;
  double distance_to_base = 0.0;  // ||m_eps - m_base||_q, space-time
  double gap_relative = 0.0;
  bool converged = false;
  bool flagged = false;  // non-converged or out-of-order distance
  std::string config_hash;
};

struct SweepResult {
  std::filesystem::path dir;
  std::vector<SweepRow> rows;    // decreasing epsilon, base row excluded
  double base_norm = 0.0;        // ||m_base||_q of the degenerate solve
  bool tail_decreasing = false;  // last three distances strictly decrease
  bool within_tol = false;       // smallest distance under the threshold
};

/// Solves the degenerate base problem, then re-solves with isotropic
/// diffusion for each epsilon in cfg.sweep_epsilons; writes sweep.csv.
SweepResult viscosity_sweep(const RunConfig& cfg,
                            const std::filesystem::path& out_root);

struct RefineRow {
  std::size_t n = 0;
  std::size_t nt = 0;
  double gap_relative = 0.0;
  bool converged = false;
  /// ||m_h - m_{h/2}||_q against the previous level prolonged by
  /// injection; zero on the coarsest level.
  double distance_to_coarser = 0.0;
  std::map<std::string, double> norms;
};

struct RefineResult {
  std::filesystem::path dir;
  std::vector<RefineRow> rows;
  /// Largest relative change of any reported norm between the two finest
  /// levels.
  double max_relative_change = 0.0;
};

/// Solves on a ladder of grids, doubling n and nt per level with a 4x
/// iteration budget; coarse solutions warm-start fine levels by node
/// injection. Stops early if a level would exceed cfg.refine_cell_budget
/// space-time cells. Writes refine.csv.
RefineResult refinement_study(const RunConfig& cfg,
                              const std::filesystem::path& out_root);

}  // namespace mfg
