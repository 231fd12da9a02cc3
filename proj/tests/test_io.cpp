#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "mfg/io.hpp"

using namespace mfg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path p;
  TempDir() {
    p = fs::temp_directory_path() /
        ("mfg_io_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(p);
  }
  ~TempDir() { fs::remove_all(p); }
};

}  // namespace

TEST_CASE("binary round trip preserves every bit") {
  TempDir tmp;
  SpaceTimeGrid g{2, 8, 5, 1.7};
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 10.0);

  ScalarField phi(g.nt + 1, g.num_nodes());
  for (double& v : phi.v) v = gauss(rng);
  write_field(tmp.p / "phi.bin", g, phi);
  SpaceTimeGrid g2;
  ScalarField phi2 = read_scalar_field(tmp.p / "phi.bin", g2);
  CHECK(g2.d == g.d);
  CHECK(g2.n == g.n);
  CHECK(g2.nt == g.nt);
  CHECK(g2.T == g.T);
  REQUIRE(phi2.v.size() == phi.v.size());
  for (std::size_t i = 0; i < phi.v.size(); ++i) CHECK(phi2.v[i] == phi.v[i]);

  DensityField m(g.nt, g.num_nodes());
  for (double& v : m.v) v = gauss(rng);
  write_field(tmp.p / "m.bin", g, m);
  DensityField m2 = read_density_field(tmp.p / "m.bin", g2);
  REQUIRE(m2.v.size() == m.v.size());
  for (std::size_t i = 0; i < m.v.size(); ++i) CHECK(m2.v[i] == m.v[i]);

  FluxField w(g.nt, g.num_nodes(), g.d);
  for (double& v : w.v) v = gauss(rng);
  write_field(tmp.p / "w.bin", g, w);
  FluxField w2 = read_flux_field(tmp.p / "w.bin", g2);
  REQUIRE(w2.v.size() == w.v.size());
  for (std::size_t i = 0; i < w.v.size(); ++i) CHECK(w2.v[i] == w.v[i]);
}

TEST_CASE("readers reject wrong placement and truncated files") {
  TempDir tmp;
  SpaceTimeGrid g{1, 8, 3, 1.0};
  ScalarField phi(g.nt + 1, 8, 1.0);
  write_field(tmp.p / "phi.bin", g, phi);
  SpaceTimeGrid g2;
  CHECK_THROWS(read_density_field(tmp.p / "phi.bin", g2));
  CHECK_THROWS(read_flux_field(tmp.p / "phi.bin", g2));

  // truncate the payload
  fs::resize_file(tmp.p / "phi.bin", fs::file_size(tmp.p / "phi.bin") - 8);
  CHECK_THROWS(read_scalar_field(tmp.p / "phi.bin", g2));

  std::ofstream(tmp.p / "garbage.bin") << "not a field";
  CHECK_THROWS(read_scalar_field(tmp.p / "garbage.bin", g2));
}

TEST_CASE("csv export carries full precision and interval timestamps") {
  TempDir tmp;
  SpaceTimeGrid g{1, 4, 2, 1.0};
  DensityField m(g.nt, 4);
  m.at(0, 0) = 1.0 / 3.0;
  m.at(1, 3) = 0.1;
  write_field_csv(tmp.p / "m.csv", g, m);
  std::ifstream is(tmp.p / "m.csv");
  std::string header, line;
  std::getline(is, header);
  CHECK(header.find("value") != std::string::npos);
  std::getline(is, line);
  // interval field sampled at midpoint t = 0.25
  CHECK(line.find("0.25") != std::string::npos);
  CHECK(line.find("0.33333333333333") != std::string::npos);
  std::size_t rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 8);
}
