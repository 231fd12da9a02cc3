#include "mfg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mfg {

namespace {

using nlohmann::json;

std::string density_name(DensityPreset p) {
  switch (p) {
    case DensityPreset::Uniform: return "uniform";
    case DensityPreset::PeriodicBump: return "periodic-bump";
    case DensityPreset::TwoBumps: return "two-bumps";
  }
  return "uniform";
}

DensityPreset density_from(const std::string& s) {
  if (s == "uniform") return DensityPreset::Uniform;
  if (s == "periodic-bump") return DensityPreset::PeriodicBump;
  if (s == "two-bumps") return DensityPreset::TwoBumps;
  throw std::invalid_argument("unknown density preset: " + s);
}

std::string terminal_name(TerminalPreset p) {
  switch (p) {
    case TerminalPreset::Zero: return "zero";
    case TerminalPreset::Cosine: return "cosine";
    case TerminalPreset::File: return "file";
  }
  return "zero";
}

TerminalPreset terminal_from(const std::string& s) {
  if (s == "zero") return TerminalPreset::Zero;
  if (s == "cosine") return TerminalPreset::Cosine;
  if (s == "file") return TerminalPreset::File;
  throw std::invalid_argument("unknown terminal preset: " + s);
}

std::string diffusion_name(DiffusionPreset p) {
  switch (p) {
    case DiffusionPreset::Zero: return "zero";
    case DiffusionPreset::Isotropic: return "isotropic";
    case DiffusionPreset::FactoredShear: return "factored-shear";
  }
  return "zero";
}

DiffusionPreset diffusion_from(const std::string& s) {
  if (s == "zero") return DiffusionPreset::Zero;
  if (s == "isotropic") return DiffusionPreset::Isotropic;
  if (s == "factored-shear") return DiffusionPreset::FactoredShear;
  throw std::invalid_argument("unknown diffusion preset: " + s);
}

std::string experiment_name(ExperimentKind e) {
  switch (e) {
    case ExperimentKind::Validate: return "validate";
    case ExperimentKind::Solve: return "solve";
    case ExperimentKind::SweepViscosity: return "sweep-viscosity";
    case ExperimentKind::Refine: return "refine";
  }
  return "solve";
}

ExperimentKind experiment_from(const std::string& s) {
  if (s == "validate") return ExperimentKind::Validate;
  if (s == "solve") return ExperimentKind::Solve;
  if (s == "sweep-viscosity") return ExperimentKind::SweepViscosity;
  if (s == "refine") return ExperimentKind::Refine;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j = json::parse(text);
  if (j.value("schema_version", 1) != 1)
    throw std::invalid_argument("unsupported config schema version");
  RunConfig c;
  const json& mj = j.at("model");
  c.r = mj.value("r", c.r);
  c.cH = mj.value("cH", c.cH);
  c.q = mj.value("q", c.q);
  c.cf = mj.value("cf", c.cf);
  c.T = mj.value("T", c.T);
  c.diffusion = diffusion_from(mj.value("diffusion", "zero"));
  c.epsilon = mj.value("epsilon", c.epsilon);
  const json& gj = j.at("grid");
  c.d = gj.value("d", c.d);
  c.n = gj.value("n", c.n);
  c.nt = gj.value("nt", c.nt);
  if (j.contains("density")) {
    const json& dj = j["density"];
    c.density = density_from(dj.value("preset", "uniform"));
    c.bump_center = dj.value("center", c.bump_center);
    c.bump_concentration = dj.value("concentration", c.bump_concentration);
  }
  if (j.contains("terminal")) {
    const json& tj = j["terminal"];
    c.terminal = terminal_from(tj.value("preset", "zero"));
    c.cosine_amplitude = tj.value("amplitude", c.cosine_amplitude);
    c.cosine_frequency = tj.value("frequency", c.cosine_frequency);
    c.terminal_file = tj.value("file", c.terminal_file);
  }
  if (j.contains("solver")) {
    const json& sj = j["solver"];
    c.solver.max_iters = sj.value("max_iters", c.solver.max_iters);
    c.solver.gap_tol = sj.value("gap_tol", c.solver.gap_tol);
    c.solver.step_ratio = sj.value("step_ratio", c.solver.step_ratio);
    c.solver.overrelax = sj.value("overrelax", c.solver.overrelax);
    c.solver.check_every = sj.value("check_every", c.solver.check_every);
  }
  if (j.contains("experiment")) {
    const json& ej = j["experiment"];
    c.experiment = experiment_from(ej.value("kind", "solve"));
    if (ej.contains("epsilons"))
      c.sweep_epsilons = ej["epsilons"].get<std::vector<double>>();
    c.sweep_distance_tol = ej.value("distance_tol", c.sweep_distance_tol);
    c.refine_levels = ej.value("levels", c.refine_levels);
    c.refine_cell_budget = ej.value("cell_budget", c.refine_cell_budget);
  }
  c.output_dir = j.value("output_dir", c.output_dir);
  c.seed = j.value("seed", c.seed);
  c.solver.seed = c.seed;
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_json_text(ss.str());
}

std::string RunConfig::to_json_text() const {
  json j;
  j["schema_version"] = 1;
  j["model"] = {{"r", r},       {"cH", cH},
                {"q", q},       {"cf", cf},
                {"T", T},       {"diffusion", diffusion_name(diffusion)},
                {"epsilon", epsilon}};
  j["grid"] = {{"d", d}, {"n", n}, {"nt", nt}};
  j["density"] = {{"preset", density_name(density)},
                  {"center", bump_center},
                  {"concentration", bump_concentration}};
  j["terminal"] = {{"preset", terminal_name(terminal)},
                   {"amplitude", cosine_amplitude},
                   {"frequency", cosine_frequency},
                   {"file", terminal_file}};
  j["solver"] = {{"max_iters", solver.max_iters},
                 {"gap_tol", solver.gap_tol},
                 {"step_ratio", solver.step_ratio},
                 {"overrelax", solver.overrelax},
                 {"check_every", solver.check_every}};
  j["experiment"] = {{"kind", experiment_name(experiment)},
                     {"epsilons", sweep_epsilons},
                     {"distance_tol", sweep_distance_tol},
                     {"levels", refine_levels},
                     {"cell_budget", refine_cell_budget}};
  j["output_dir"] = output_dir;
  j["seed"] = seed;
  return j.dump(2);
}

std::string RunConfig::hash() const {
  // FNV-1a over the canonical serialization; stable across platforms.
  const std::string s = to_json_text();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

SpaceTimeGrid make_grid(const RunConfig& cfg) {
  SpaceTimeGrid g;
  g.d = cfg.d;
  g.n = cfg.n;
  g.nt = cfg.nt;
  g.T = cfg.T;
  g.validate();
  return g;
}

namespace {

std::vector<double> build_density(const RunConfig& cfg,
                                  const SpaceTimeGrid& grid) {
  const std::size_t N = grid.num_nodes();
  std::vector<double> m0(N, 1.0);
  auto bump = [&](double center, double conc, std::size_t x) {
    double v = 1.0;
    for (std::size_t ax = 0; ax < grid.d; ++ax)
      v *= std::exp(conc * std::cos(2.0 * M_PI * (grid.coord(x, ax) - center)));
    return v;
  };
  switch (cfg.density) {
    case DensityPreset::Uniform:
      break;
    case DensityPreset::PeriodicBump:
      for (std::size_t x = 0; x < N; ++x)
        m0[x] = bump(cfg.bump_center, cfg.bump_concentration, x);
      break;
    case DensityPreset::TwoBumps:
      for (std::size_t x = 0; x < N; ++x)
        m0[x] = bump(cfg.bump_center, cfg.bump_concentration, x) +
                bump(cfg.bump_center + 0.5, cfg.bump_concentration, x);
      break;
  }
  double mass = 0.0;
  for (double v : m0) mass += v;
  mass *= grid.cell_volume();
  for (double& v : m0) v /= mass;
  return m0;
}

std::vector<double> build_terminal(const RunConfig& cfg,
                                   const SpaceTimeGrid& grid) {
  const std::size_t N = grid.num_nodes();
  std::vector<double> phiT(N, 0.0);
  switch (cfg.terminal) {
    case TerminalPreset::Zero:
      break;
    case TerminalPreset::Cosine:
      for (std::size_t x = 0; x < N; ++x) {
        double v = cfg.cosine_amplitude;
        for (std::size_t ax = 0; ax < grid.d; ++ax)
          v *= std::cos(2.0 * M_PI * cfg.cosine_frequency * grid.coord(x, ax));
        phiT[x] = v;
      }
      break;
    case TerminalPreset::File: {
      std::ifstream is(cfg.terminal_file);
      if (!is)
        throw std::runtime_error("cannot open terminal cost file: " +
                                 cfg.terminal_file);
      for (std::size_t x = 0; x < N; ++x)
        if (!(is >> phiT[x]))
          throw std::runtime_error("terminal cost file too short");
      break;
    }
  }
  return phiT;
}

DiffusionSpec build_diffusion(const RunConfig& cfg,
                              const SpaceTimeGrid& grid) {
  switch (cfg.diffusion) {
    case DiffusionPreset::Zero:
      return DiffusionSpec::zero(grid.d);
    case DiffusionPreset::Isotropic:
      return DiffusionSpec::isotropic(grid.d, cfg.epsilon);
    case DiffusionPreset::FactoredShear: {
      // Spatially varying degenerate rank-one diffusion:
      // Sigma(x) = sqrt(epsilon) * (1 + cos(2 pi x_0)/2) * u, with a fixed
      // direction u; Lipschitz in x and possibly anisotropic in d = 2.
      const std::size_t N = grid.num_nodes();
      const std::size_t cols = 1;
      std::vector<double> sigma(N * grid.d * cols, 0.0);
      const double u[2] = {1.0, grid.d == 2 ? 0.5 : 0.0};
      const double unorm = std::sqrt(u[0] * u[0] + u[1] * u[1]);
      for (std::size_t x = 0; x < N; ++x) {
        const double s = std::sqrt(cfg.epsilon) *
                         (1.0 + 0.5 * std::cos(2.0 * M_PI * grid.coord(x, 0)));
        for (std::size_t i = 0; i < grid.d; ++i)
          sigma[x * grid.d + i] = s * u[i] / unorm;
      }
      return DiffusionSpec::factored(grid.d, cols, std::move(sigma));
    }
  }
  return DiffusionSpec::zero(grid.d);
}

}  // namespace

ModelSpec make_model(const RunConfig& cfg, const SpaceTimeGrid& grid) {
  ModelSpec model;
  model.hamiltonian.r = cfg.r;
  model.hamiltonian.cH = cfg.cH;
  model.coupling.q = cfg.q;
  model.coupling.cf = cfg.cf;
  model.diffusion = build_diffusion(cfg, grid);
  model.T = cfg.T;
  model.m0 = build_density(cfg, grid);
  model.phiT = build_terminal(cfg, grid);
  model.cell_volume = grid.cell_volume();
  model.validate();
  return model;
}

RunConfig uniform_1d_config() {
  RunConfig c;
  c.r = 2.0;
  c.q = 2.0;
  c.cH = 1.0;
  c.cf = 1.0;
  c.d = 1;
  c.n = 64;
  c.nt = 64;
  c.T = 1.0;
  c.density = DensityPreset::Uniform;
  c.terminal = TerminalPreset::Zero;
  c.diffusion = DiffusionPreset::Zero;
  c.solver.gap_tol = 1e-9;
  c.solver.max_iters = 200000;
  return c;
}

RunConfig gaussbump_1d_config() {
  RunConfig c;
  c.r = 2.0;
  c.q = 2.0;
  c.cH = 1.0;
  c.cf = 1.0;
  c.d = 1;
  c.n = 64;
  c.nt = 64;
  c.T = 1.0;
  c.density = DensityPreset::PeriodicBump;
  c.bump_center = 0.5;
  c.bump_concentration = 2.0;
  c.terminal = TerminalPreset::Cosine;
  c.cosine_amplitude = 0.1;
  c.cosine_frequency = 1.0;
  c.diffusion = DiffusionPreset::Zero;
  c.solver.gap_tol = 1e-6;
  c.solver.max_iters = 400000;
  return c;
}

}  // namespace mfg
