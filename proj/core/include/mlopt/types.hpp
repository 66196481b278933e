#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace mlopt {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Index = Eigen::Index;

/// Vector or operator sizes disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies outside the domain of an objective (e.g. KL with Ay <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An optional capability (Hessian-vector products) was requested but is
/// not provided by the objective.
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require_size(const Vector& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw DimensionError(std::string(what) + ": expected size " +
                         std::to_string(expected) + ", got " +
                         std::to_string(v.size()));
  }
}

/// Level in a grid hierarchy; 0 is the finest.
struct LevelIndex {
  constexpr explicit LevelIndex(std::size_t e) : ell(e) {}
  std::size_t ell;

  [[nodiscard]] constexpr LevelIndex coarser() const { return LevelIndex(ell + 1); }
  friend constexpr bool operator==(LevelIndex, LevelIndex) = default;
};

}  // namespace mlopt
