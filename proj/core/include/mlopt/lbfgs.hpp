#pragma once

#include <deque>

#include "mlopt/types.hpp"

namespace mlopt {

/// Limited-memory BFGS inverse-Hessian approximation (two-loop recursion).
/// With empty memory the direction is plain steepest descent, -g.
class LbfgsMemory {
 public:
  explicit LbfgsMemory(int pairs) : capacity_(pairs) {
    if (pairs <= 0) throw std::invalid_argument("LbfgsMemory: need at least one correction pair");
  }

  /// -H g with H the current inverse-Hessian approximation.
  [[nodiscard]] Vector direction(const Vector& g) const;

  /// Stores (s, y) unless <s, y> <= 1e-10 ||s|| ||y||; returns false when skipped.
  bool update(const Vector& s, const Vector& y);

  void reset() { pairs_.clear(); }
  [[nodiscard]] int size() const { return static_cast<int>(pairs_.size()); }
  [[nodiscard]] int capacity() const { return capacity_; }

 private:
  struct Pair {
    Vector s;
    Vector y;
    double rho;
  };
  int capacity_;
  std::deque<Pair> pairs_;
};

}  // namespace mlopt
