#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

double integrate_slice(const double* slice, const SpaceTimeGrid& grid) {
  double s = 0.0;
  const std::size_t N = grid.num_nodes();
  for (std::size_t i = 0; i < N; ++i) s += slice[i];
  return s * grid.cell_volume();
}

double integrate_density(const DensityField& m, const SpaceTimeGrid& grid,
                         std::size_t k) {
  return integrate_slice(m.slice(k), grid);
}

namespace {

double spatial_norm(const double* slice, std::size_t count, double vol,
                    double s) {
  if (std::isinf(s)) {
    double sup = 0.0;
    for (std::size_t i = 0; i < count; ++i)
      sup = std::max(sup, std::abs(slice[i]));
    return sup;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i)
    acc += std::pow(std::abs(slice[i]), s);
  return std::pow(acc * vol, 1.0 / s);
}

}  // namespace

double field_norm(const double* data, std::size_t slices,
                  std::size_t values_per_slice, const SpaceTimeGrid& grid,
                  double s, NormMode mode) {
  const double vol = grid.cell_volume();
  if (mode == NormMode::SupInTime) {
    double sup = 0.0;
    for (std::size_t k = 0; k < slices; ++k)
      sup = std::max(sup, spatial_norm(data + k * values_per_slice,
                                       values_per_slice, vol, s));
    return sup;
  }
  if (std::isinf(s)) {
    double sup = 0.0;
    for (std::size_t i = 0; i < slices * values_per_slice; ++i)
      sup = std::max(sup, std::abs(data[i]));
    return sup;
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < slices; ++k) {
    const double* sl = data + k * values_per_slice;
    for (std::size_t i = 0; i < values_per_slice; ++i)
      acc += std::pow(std::abs(sl[i]), s);
  }
  return std::pow(acc * vol * grid.dt(), 1.0 / s);
}

double field_norm(const DensityField& f, const SpaceTimeGrid& grid, double s,
                  NormMode mode) {
  return field_norm(f.v.data(), f.intervals, f.nodes, grid, s, mode);
}

double field_norm(const FluxField& f, const SpaceTimeGrid& grid, double s,
                  NormMode mode) {
  // Euclidean norm over components per node, then the spatial/space-time
  // L^s sum over nodes.
  std::vector<double> mag(f.intervals * f.nodes);
  for (std::size_t k = 0; k < f.intervals; ++k)
    for (std::size_t i = 0; i < f.nodes; ++i) {
      double s2 = 0.0;
      const double* p = f.node(k, i);
      for (std::size_t c = 0; c < f.dim; ++c) s2 += p[c] * p[c];
      mag[k * f.nodes + i] = std::sqrt(s2);
    }
  return field_norm(mag.data(), f.intervals, f.nodes, grid, s, mode);
}

double field_norm(const ScalarField& f, const SpaceTimeGrid& grid, double s,
                  NormMode mode) {
  if (mode == NormMode::SupInTime)
    return field_norm(f.v.data(), f.slices, f.nodes, grid, s, mode);
  // Interval quadrature with right endpoints: slices 1..nt.
  return field_norm(f.v.data() + f.nodes, f.slices - 1, f.nodes, grid, s,
                    mode);
}

}  // namespace mfg
