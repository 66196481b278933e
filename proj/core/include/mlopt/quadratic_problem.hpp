#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "mlopt/grid_transfer.hpp"
#include "mlopt/objective.hpp"

namespace mlopt {

/// f(y) = 1/2 y^T Q y - s^T y with symmetric Q.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(SparseMatrix q, Vector s);
  QuadraticObjective(const Eigen::MatrixXd& q, Vector s);

  [[nodiscard]] Index dim() const override { return q_.rows(); }
  [[nodiscard]] double value(const Vector& y) const override;
  [[nodiscard]] Vector gradient(const Vector& y) const override;
  [[nodiscard]] bool has_hessian_vec() const override { return true; }
  [[nodiscard]] Vector hessian_vec(const Vector& y, const Vector& v) const override;
  [[nodiscard]] bool is_quadratic() const override { return true; }

  [[nodiscard]] const SparseMatrix& q() const { return q_; }
  [[nodiscard]] const Vector& s() const { return s_; }

 private:
  SparseMatrix q_;
  Vector s_;
};

/// 5-point graph Laplacian with Neumann boundary (row sums zero).
SparseMatrix graph_laplacian(Grid2D grid);

struct QuadraticSetup {
  int side = 32;
  int levels = 3;
  std::uint64_t seed = 1;
};

/// f_l(y) = 1/2 y^T (mu I + sigma L_l) y - <s_l, y> on each grid, with
/// mu in [0.5, 2], sigma in [0.1, 1] drawn from the seed and s_l a smooth
/// function sampled at the pixel centres of level l.
struct QuadraticProblem {
  ObjectiveHierarchy hierarchy;
  double mu = 1.0;
  double sigma = 1.0;
  Vector y0;
};

QuadraticProblem build_quadratic_problem(const QuadraticSetup& setup);

}  // namespace mlopt
