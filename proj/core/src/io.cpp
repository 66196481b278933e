#include "mlopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/SparseExtra>

namespace mlopt {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

void save_matrix_market(const std::filesystem::path& path, const SparseMatrix& m) {
  // Eigen's writer uses the stream's default precision, so write by hand.
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out.precision(17);
  for (Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

SparseMatrix load_matrix_market(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file '" + path.string() + "'");
  Eigen::SparseMatrix<double> m;
  if (!Eigen::loadMarket(m, path.string())) throw IoError("cannot parse matrix market file '" + path.string() + "'");
  return SparseMatrix(m);
}

void write_pgm(const std::filesystem::path& path, Grid2D grid, const Vector& image, double lo, double hi) {
  require_size(image, grid.size(), "write_pgm");
  if (lo == hi) {
    lo = image.minCoeff();
    hi = image.maxCoeff();
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::vector<unsigned char> pixels(static_cast<std::size_t>(image.size()));
  for (Index i = 0; i < image.size(); ++i) {
    const double t = std::clamp((image[i] - lo) / span, 0.0, 1.0);
    pixels[static_cast<std::size_t>(i)] = static_cast<unsigned char>(std::lround(255.0 * t));
  }
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << "P5\n" << grid.side << ' ' << grid.side << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_vector_csv(const std::filesystem::path& path, const Vector& v) {
  auto out = open_out(path);
  out.precision(17);
  for (Index i = 0; i < v.size(); ++i) out << v[i] << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Vector read_vector_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      values.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw IoError("bad number '" + line + "' in '" + path.string() + "'");
    }
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace mlopt
