#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mfg {

/// Uniform periodic discretization of [0,T] x T^d with d in {1,2}.
/// Spatial nodes are x_i = i*h, h = 1/n per axis; time nodes t_k = k*dt.
/// Node index layout is row-major: idx = ix*n + iy for d = 2.
struct SpaceTimeGrid {
  std::size_t d = 1;
  std::size_t n = 8;    // nodes per axis
  std::size_t nt = 8;   // time intervals
  double T = 1.0;

  double h() const { return 1.0 / static_cast<double>(n); }
  double dt() const { return T / static_cast<double>(nt); }
  std::size_t num_nodes() const { return d == 1 ? n : n * n; }
  double cell_volume() const { return d == 1 ? h() : h() * h(); }
  /// Weight of one space-time cell in all inner products and norms.
  double cell_weight() const { return dt() * cell_volume(); }

  /// Periodic neighbor: shift node index along an axis by `step` nodes.
  std::size_t shift(std::size_t idx, std::size_t axis, long step) const {
    const long nn = static_cast<long>(n);
    if (d == 1) {
      long i = (static_cast<long>(idx) + step) % nn;
      return static_cast<std::size_t>(i < 0 ? i + nn : i);
    }
    long ix = static_cast<long>(idx / n);
    long iy = static_cast<long>(idx % n);
    if (axis == 0) {
      ix = (ix + step) % nn;
      if (ix < 0) ix += nn;
    } else {
      iy = (iy + step) % nn;
      if (iy < 0) iy += nn;
    }
    return static_cast<std::size_t>(ix) * n + static_cast<std::size_t>(iy);
  }

  /// Coordinate of a node along an axis, in [0,1).
  double coord(std::size_t idx, std::size_t axis) const {
    if (d == 1) return static_cast<double>(idx) * h();
    return axis == 0 ? static_cast<double>(idx / n) * h()
                     : static_cast<double>(idx % n) * h();
  }

  void validate() const {
    if (d != 1 && d != 2)
      throw std::invalid_argument("grid: d must be 1 or 2");
    if (n < 4) throw std::invalid_argument("grid: need n >= 4 per axis");
    if (nt < 1) throw std::invalid_argument("grid: need nt >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("grid: T must be positive");
  }
};

/// Time-node placed scalar field: nt+1 slices of n^d values (phi, alpha).
struct ScalarField {
  std::size_t slices = 0;
  std::size_t nodes = 0;
  std::vector<double> v;

  ScalarField() = default;
  ScalarField(std::size_t slices_, std::size_t nodes_, double fill = 0.0)
      : slices(slices_), nodes(nodes_), v(slices_ * nodes_, fill) {}
  double& at(std::size_t k, std::size_t i) { return v[k * nodes + i]; }
  double at(std::size_t k, std::size_t i) const { return v[k * nodes + i]; }
  double* slice(std::size_t k) { return v.data() + k * nodes; }
  const double* slice(std::size_t k) const { return v.data() + k * nodes; }
};

/// Time-interval placed scalar field: nt slices (m, a). The initial slice
/// m0 is fixed data on the model, not stored here.
struct DensityField {
  std::size_t intervals = 0;
  std::size_t nodes = 0;
  std::vector<double> v;

  DensityField() = default;
  DensityField(std::size_t intervals_, std::size_t nodes_, double fill = 0.0)
      : intervals(intervals_), nodes(nodes_), v(intervals_ * nodes_, fill) {}
  double& at(std::size_t k, std::size_t i) { return v[k * nodes + i]; }
  double at(std::size_t k, std::size_t i) const { return v[k * nodes + i]; }
  double* slice(std::size_t k) { return v.data() + k * nodes; }
  const double* slice(std::size_t k) const { return v.data() + k * nodes; }
};

/// Time-interval placed vector field: nt slices of n^d nodes of d
/// components, component-minor (w, b).
struct FluxField {
  std::size_t intervals = 0;
  std::size_t nodes = 0;
  std::size_t dim = 0;
  std::vector<double> v;

  FluxField() = default;
  FluxField(std::size_t intervals_, std::size_t nodes_, std::size_t dim_,
            double fill = 0.0)
      : intervals(intervals_),
        nodes(nodes_),
        dim(dim_),
        v(intervals_ * nodes_ * dim_, fill) {}
  double& at(std::size_t k, std::size_t i, std::size_t c) {
    return v[(k * nodes + i) * dim + c];
  }
  double at(std::size_t k, std::size_t i, std::size_t c) const {
    return v[(k * nodes + i) * dim + c];
  }
  double* node(std::size_t k, std::size_t i) {
    return v.data() + (k * nodes + i) * dim;
  }
  const double* node(std::size_t k, std::size_t i) const {
    return v.data() + (k * nodes + i) * dim;
  }
};

/// h^d times the node sum of one density slice.
double integrate_density(const DensityField& m, const SpaceTimeGrid& grid,
                         std::size_t k);
double integrate_slice(const double* slice, const SpaceTimeGrid& grid);

enum class NormMode { SpaceTime, SupInTime };

/// Discrete L^s norm with cell-volume weights. SpaceTime integrates dt*h^d
/// over all slices; SupInTime returns the max over slices of the spatial
/// L^s norm. s may be infinity.
double field_norm(const double* data, std::size_t slices, std::size_t values_per_slice,
                  const SpaceTimeGrid& grid, double s, NormMode mode);

double field_norm(const DensityField& f, const SpaceTimeGrid& grid, double s,
                  NormMode mode = NormMode::SpaceTime);
double field_norm(const FluxField& f, const SpaceTimeGrid& grid, double s,
                  NormMode mode = NormMode::SpaceTime);
/// Node-placed fields are integrated over the nt right-endpoint slices so
/// that a constant field on [0,T] has norm |const| * T^(1/s).
double field_norm(const ScalarField& f, const SpaceTimeGrid& grid, double s,
                  NormMode mode = NormMode::SpaceTime);

}  // namespace mfg
