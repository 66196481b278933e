#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "mlopt/io.hpp"
#include "mlopt/tomography.hpp"
#include "support/oracles.hpp"

using namespace mlopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mlopt_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("matrix market round trip is exact") {
  const Projector p = build_projector(Grid2D(16), 0.3);
  const fs::path path = scratch("a.mtx");
  save_matrix_market(path, p.a);
  const SparseMatrix back = load_matrix_market(path);
  REQUIRE(back.rows() == p.a.rows());
  REQUIRE(back.cols() == p.a.cols());
  CHECK(back.nonZeros() == p.a.nonZeros());
  CHECK((oracle::dense(back) - oracle::dense(p.a)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(load_matrix_market(scratch("missing.mtx")), IoError);
}

TEST_CASE("vector csv round trip is exact") {
  std::mt19937_64 rng(12);
  Vector v = oracle::random_vector(rng, 50, -1e6, 1e6);
  v[0] = 1.0 / 3.0;
  v[1] = -0.0;
  const fs::path path = scratch("v.csv");
  write_vector_csv(path, v);
  CHECK((read_vector_csv(path) - v).norm() == 0.0);

  std::ofstream(scratch("bad.csv")) << "1.0\nabc\n";
  CHECK_THROWS_AS(read_vector_csv(scratch("bad.csv")), IoError);
}

TEST_CASE("pgm has a P5 header and one byte per pixel") {
  Vector img(16);
  for (int i = 0; i < 16; ++i) img[i] = i / 15.0;
  const fs::path path = scratch("img.pgm");
  write_pgm(path, Grid2D(4), img);
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  in.get();
  CHECK(magic == "P5");
  CHECK(w == 4);
  CHECK(h == 4);
  CHECK(maxval == 255);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(data.size() == 16);
  CHECK(static_cast<unsigned char>(data.front()) == 0);
  CHECK(static_cast<unsigned char>(data.back()) == 255);
  CHECK(fs::file_size(path) == std::string("P5\n4 4\n255\n").size() + 16);

  write_pgm(path, Grid2D(4), 5.0 * img, 0.0, 0.0);  // auto range
  std::ifstream again(path, std::ios::binary);
  std::string all((std::istreambuf_iterator<char>(again)), std::istreambuf_iterator<char>());
  CHECK(static_cast<unsigned char>(all.back()) == 255);
  CHECK_THROWS_AS(write_pgm(path, Grid2D(4), Vector::Zero(15)), DimensionError);
}
