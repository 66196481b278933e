#include "mlopt/quadratic_problem.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace mlopt {

QuadraticObjective::QuadraticObjective(SparseMatrix q, Vector s) : q_(std::move(q)), s_(std::move(s)) {
  if (q_.rows() != q_.cols()) throw DimensionError("QuadraticObjective: Q must be square");
  require_size(s_, q_.rows(), "QuadraticObjective linear term");
}

QuadraticObjective::QuadraticObjective(const Eigen::MatrixXd& q, Vector s)
    : QuadraticObjective(SparseMatrix(q.sparseView()), std::move(s)) {}

double QuadraticObjective::value(const Vector& y) const {
  require_size(y, dim(), "QuadraticObjective::value");
  return 0.5 * y.dot(q_ * y) - s_.dot(y);
}

Vector QuadraticObjective::gradient(const Vector& y) const {
  require_size(y, dim(), "QuadraticObjective::gradient");
  return q_ * y - s_;
}

Vector QuadraticObjective::hessian_vec(const Vector& y, const Vector& v) const {
  require_size(y, dim(), "QuadraticObjective::hessian_vec point");
  require_size(v, dim(), "QuadraticObjective::hessian_vec direction");
  return q_ * v;
}

SparseMatrix graph_laplacian(Grid2D grid) {
  const int s = grid.side;
  std::vector<Eigen::Triplet<double>> t;
  auto edge = [&](Index i, Index j) {
    t.emplace_back(i, i, 1.0);
    t.emplace_back(j, j, 1.0);
    t.emplace_back(i, j, -1.0);
    t.emplace_back(j, i, -1.0);
  };
  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < s; ++c) {
      const Index i = Index(r) * s + c;
      if (c + 1 < s) edge(i, i + 1);
      if (r + 1 < s) edge(i, i + s);
    }
  }
  SparseMatrix l(grid.size(), grid.size());
  l.setFromTriplets(t.begin(), t.end());
  l.makeCompressed();
  return l;
}

QuadraticProblem build_quadratic_problem(const QuadraticSetup& setup) {
  if (setup.levels < 1) throw std::invalid_argument("quadratic: levels must be >= 1");
  std::mt19937_64 rng(setup.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double mu = 0.5 + 1.5 * unit(rng);
  const double sigma = 0.1 + 0.9 * unit(rng);
  const double phase = 2.0 * std::numbers::pi * unit(rng);

  std::vector<ObjectiveHierarchy::Level> levels;
  std::vector<TransferPair> pairs;
  Grid2D grid(setup.side);
  for (int l = 0; l < setup.levels; ++l) {
    if (l > 0) {
      pairs.push_back(build_full_weighting(grid));
      grid = grid.coarser();
    }
    SparseMatrix id(grid.size(), grid.size());
    id.setIdentity();
    SparseMatrix q = mu * id + sigma * graph_laplacian(grid);
    Vector s(grid.size());
    for (int r = 0; r < grid.side; ++r) {
      for (int c = 0; c < grid.side; ++c) {
        const double u = (c + 0.5) / grid.side;
        const double v = (r + 0.5) / grid.side;
        s[Index(r) * grid.side + c] = std::sin(2.0 * std::numbers::pi * u + phase) * std::cos(std::numbers::pi * v) + u * v;
      }
    }
    levels.push_back({grid, std::make_shared<QuadraticObjective>(std::move(q), std::move(s))});
  }

  const Index n = Index(setup.side) * setup.side;
  Vector y0(n);
  for (Index i = 0; i < n; ++i) y0[i] = 2.0 * unit(rng) - 1.0;
  return QuadraticProblem{ObjectiveHierarchy(std::move(levels), std::move(pairs)), mu, sigma, std::move(y0)};
}

}  // namespace mlopt
