#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mfg/grid.hpp"

namespace mfg {

inline constexpr const char* kVersionString = "mfgdual-0.1.0";

/// Flat binary field layout. Header: magic "MFGF", version, d, n, nt,
/// placement (0 = time-node scalar, 1 = interval scalar, 2 = interval
/// vector), component count; payload 64-bit little-endian doubles,
/// slice-major then node-major then component.
enum class FieldPlacement : std::uint32_t {
  TimeNode = 0,
  Interval = 1,
  IntervalVector = 2,
};

void write_field(const std::filesystem::path& path, const SpaceTimeGrid& grid,
                 const ScalarField& f);
void write_field(const std::filesystem::path& path, const SpaceTimeGrid& grid,
                 const DensityField& f);
void write_field(const std::filesystem::path& path, const SpaceTimeGrid& grid,
                 const FluxField& f);

ScalarField read_scalar_field(const std::filesystem::path& path,
                              SpaceTimeGrid& grid_out);
DensityField read_density_field(const std::filesystem::path& path,
                                SpaceTimeGrid& grid_out);
FluxField read_flux_field(const std::filesystem::path& path,
                          SpaceTimeGrid& grid_out);

/// CSV with one row per (slice, node): k,t,node,coords...,values...
void write_field_csv(const std::filesystem::path& path,
                     const SpaceTimeGrid& grid, const ScalarField& f);
void write_field_csv(const std::filesystem::path& path,
                     const SpaceTimeGrid& grid, const DensityField& f);
void write_field_csv(const std::filesystem::path& path,
                     const SpaceTimeGrid& grid, const FluxField& f);

}  // namespace mfg
