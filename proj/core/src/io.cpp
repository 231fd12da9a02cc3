#include "mfg/io.hpp"

#include <fstream>
#include <stdexcept>

namespace mfg {

namespace {

constexpr std::uint32_t kMagic = 0x4647464d;  // "MFGF" little-endian
constexpr std::uint32_t kFormatVersion = 1;

struct Header {
  std::uint32_t magic;
  std::uint32_t version;
  std::uint32_t d;
  std::uint32_t n;
  std::uint32_t nt;
  std::uint32_t placement;
  std::uint32_t ncomp;
  std::uint32_t reserved;
};

void write_raw(const std::filesystem::path& path, const SpaceTimeGrid& grid,
               FieldPlacement placement, std::uint32_t ncomp,
               const std::vector<double>& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  Header h{kMagic,
           kFormatVersion,
           static_cast<std::uint32_t>(grid.d),
           static_cast<std::uint32_t>(grid.n),
           static_cast<std::uint32_t>(grid.nt),
           static_cast<std::uint32_t>(placement),
           ncomp,
           0};
  os.write(reinterpret_cast<const char*>(&h), sizeof(h));
  const double T = grid.T;
  os.write(reinterpret_cast<const char*>(&T), sizeof(T));
  os.write(reinterpret_cast<const char*>(data.data()),
           static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Header read_header(std::ifstream& is, const std::filesystem::path& path,
                   SpaceTimeGrid& grid_out) {
  Header h{};
  is.read(reinterpret_cast<char*>(&h), sizeof(h));
  double T = 1.0;
  is.read(reinterpret_cast<char*>(&T), sizeof(T));
  if (!is || h.magic != kMagic || h.version != kFormatVersion)
    throw std::runtime_error("bad field file: " + path.string());
  grid_out.d = h.d;
  grid_out.n = h.n;
  grid_out.nt = h.nt;
  grid_out.T = T;
  return h;
}

std::vector<double> read_payload(std::ifstream& is, std::size_t count,
                                 const std::filesystem::path& path) {
  std::vector<double> data(count);
  is.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw std::runtime_error("truncated field file: " + path.string());
  return data;
}

}  // namespace

void write_field(const std::filesystem::path& path, const SpaceTimeGrid& grid,
                 const ScalarField& f) {
  write_raw(path, grid, FieldPlacement::TimeNode, 1, f.v);
}

void write_field(const std::filesystem::path& path, const SpaceTimeGrid& grid,
                 const DensityField& f) {
  write_raw(path, grid, FieldPlacement::Interval, 1, f.v);
}

void write_field(const std::filesystem::path& path, const SpaceTimeGrid& grid,
                 const FluxField& f) {
  write_raw(path, grid, FieldPlacement::IntervalVector,
            static_cast<std::uint32_t>(f.dim), f.v);
}

ScalarField read_scalar_field(const std::filesystem::path& path,
                              SpaceTimeGrid& grid_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  Header h = read_header(is, path, grid_out);
  if (h.placement != static_cast<std::uint32_t>(FieldPlacement::TimeNode))
    throw std::runtime_error("not a time-node field: " + path.string());
  ScalarField f(grid_out.nt + 1, grid_out.num_nodes());
  f.v = read_payload(is, f.v.size(), path);
  return f;
}

DensityField read_density_field(const std::filesystem::path& path,
                                SpaceTimeGrid& grid_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  Header h = read_header(is, path, grid_out);
  if (h.placement != static_cast<std::uint32_t>(FieldPlacement::Interval))
    throw std::runtime_error("not an interval field: " + path.string());
  DensityField f(grid_out.nt, grid_out.num_nodes());
  f.v = read_payload(is, f.v.size(), path);
  return f;
}

FluxField read_flux_field(const std::filesystem::path& path,
                          SpaceTimeGrid& grid_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  Header h = read_header(is, path, grid_out);
  if (h.placement !=
      static_cast<std::uint32_t>(FieldPlacement::IntervalVector))
    throw std::runtime_error("not a flux field: " + path.string());
  FluxField f(grid_out.nt, grid_out.num_nodes(), h.ncomp);
  f.v = read_payload(is, f.v.size(), path);
  return f;
}

namespace {

void csv_prelude(std::ofstream& os, const SpaceTimeGrid& grid,
                 std::size_t ncomp, bool node_placed) {
  os << "k,t";
  for (std::size_t ax = 0; ax < grid.d; ++ax) os << ",x" << ax;
  if (ncomp == 1)
    os << ",value\n";
  else {
    for (std::size_t c = 0; c < ncomp; ++c) os << ",v" << c;
    os << '\n';
  }
  (void)node_placed;
}

}  // namespace

void write_field_csv(const std::filesystem::path& path,
                     const SpaceTimeGrid& grid, const ScalarField& f) {
  std::ofstream os(path);
  os.precision(17);
  csv_prelude(os, grid, 1, true);
  for (std::size_t k = 0; k < f.slices; ++k)
    for (std::size_t x = 0; x < f.nodes; ++x) {
      os << k << ',' << static_cast<double>(k) * grid.dt();
      for (std::size_t ax = 0; ax < grid.d; ++ax)
        os << ',' << grid.coord(x, ax);
      os << ',' << f.at(k, x) << '\n';
    }
}

void write_field_csv(const std::filesystem::path& path,
                     const SpaceTimeGrid& grid, const DensityField& f) {
  std::ofstream os(path);
  os.precision(17);
  csv_prelude(os, grid, 1, false);
  for (std::size_t k = 0; k < f.intervals; ++k)
    for (std::size_t x = 0; x < f.nodes; ++x) {
      os << k << ',' << (static_cast<double>(k) + 0.5) * grid.dt();
      for (std::size_t ax = 0; ax < grid.d; ++ax)
        os << ',' << grid.coord(x, ax);
      os << ',' << f.at(k, x) << '\n';
    }
}

void write_field_csv(const std::filesystem::path& path,
                     const SpaceTimeGrid& grid, const FluxField& f) {
  std::ofstream os(path);
  os.precision(17);
  csv_prelude(os, grid, f.dim, false);
  for (std::size_t k = 0; k < f.intervals; ++k)
    for (std::size_t x = 0; x < f.nodes; ++x) {
      os << k << ',' << (static_cast<double>(k) + 0.5) * grid.dt();
      for (std::size_t ax = 0; ax < grid.d; ++ax)
        os << ',' << grid.coord(x, ax);
      for (std::size_t c = 0; c < f.dim; ++c) os << ',' << f.at(k, x, c);
      os << '\n';
    }
}

}  // namespace mfg
