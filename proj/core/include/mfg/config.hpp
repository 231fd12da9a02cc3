#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mfg/grid.hpp"
#include "mfg/model.hpp"
#include "mfg/solver.hpp"

namespace mfg {

enum class DensityPreset { Uniform, PeriodicBump, TwoBumps };
enum class TerminalPreset { Zero, Cosine, File };
enum class DiffusionPreset { Zero, Isotropic, FactoredShear };
enum class ExperimentKind { Validate, Solve, SweepViscosity, Refine };

/// Versioned run configuration; parsed from / serialized to JSON.
struct RunConfig {
  // model
  double r = 2.0;
  double cH = 1.0;
  double q = 2.0;
  double cf = 1.0;
  DiffusionPreset diffusion = DiffusionPreset::Zero;
  double epsilon = 0.0;
  double T = 1.0;
  // grid
  std::size_t d = 1;
  std::size_t n = 64;
  std::size_t nt = 64;
  // initial density preset
  DensityPreset density = DensityPreset::Uniform;
  double bump_center = 0.5;
  double bump_concentration = 4.0;
  // terminal cost preset
  TerminalPreset terminal = TerminalPreset::Zero;
  double cosine_amplitude = 0.1;
  double cosine_frequency = 1.0;
  std::string terminal_file;  // sampled-file preset
  // solver
  SolverConfig solver;
  // experiment
  ExperimentKind experiment = ExperimentKind::Solve;
  std::vector<double> sweep_epsilons = {0.4, 0.2, 0.1, 0.05, 0.025};
  double sweep_distance_tol = 0.05;  // fraction of ||m_0||_q
  std::size_t refine_levels = 2;
  std::size_t refine_cell_budget = 1u << 22;
  std::string output_dir;
  std::uint64_t seed = 0;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
  std::string to_json_text() const;
  /// FNV-1a hash of the canonical serialization, hex string.
  std::string hash() const;
};

SpaceTimeGrid make_grid(const RunConfig& cfg);
/// Builds and validates the model; throws HypothesisError with the name
/// of the violated hypothesis on bad input.
ModelSpec make_model(const RunConfig& cfg, const SpaceTimeGrid& grid);

/// Built-in instances used across the test and acceptance suites.
RunConfig uniform_1d_config();
RunConfig gaussbump_1d_config();

}  // namespace mfg
