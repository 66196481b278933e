#pragma once

#include <filesystem>

#include "mlopt/grid_transfer.hpp"
#include "mlopt/types.hpp"

namespace mlopt {

/// Raised when a file cannot be opened, written or parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix-market coordinate format, 17 significant digits (exact round trip).
void save_matrix_market(const std::filesystem::path& path, const SparseMatrix& m);
SparseMatrix load_matrix_market(const std::filesystem::path& path);

/// 8-bit binary PGM. Values are mapped linearly from [lo, hi] to [0, 255]
/// and clamped; lo == hi uses the image's own min/max.
void write_pgm(const std::filesystem::path& path, Grid2D grid, const Vector& image, double lo = 0.0,
               double hi = 1.0);

/// One value per line, 17 significant digits.
void write_vector_csv(const std::filesystem::path& path, const Vector& v);
Vector read_vector_csv(const std::filesystem::path& path);

}  // namespace mlopt
