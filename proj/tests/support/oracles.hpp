#pragma once

// Independent reference computations for tests: dense assembly, finite
// differences and eigen/singular value oracles.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "mlopt/objective.hpp"
#include "mlopt/types.hpp"

namespace oracle {

using mlopt::Index;
using mlopt::Vector;
using Dense = Eigen::MatrixXd;

inline Dense dense(const mlopt::SparseMatrix& m) { return Dense(m); }

inline Vector random_vector(std::mt19937_64& rng, Index n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline double largest_singular_value(const Dense& m) {
  Eigen::JacobiSVD<Dense> svd(m);
  return svd.singularValues()(0);
}

inline Index rank(const Dense& m) {
  Eigen::FullPivLU<Dense> lu(m);
  lu.setThreshold(1e-10);
  return lu.rank();
}

/// Central differences of f.value, one coordinate at a time.
inline Vector fd_gradient(const mlopt::Objective& f, const Vector& y, double h = 1e-6) {
  Vector g(y.size());
  Vector p = y;
  for (Index i = 0; i < y.size(); ++i) {
    const double s = h * std::max(1.0, std::abs(y[i]));
    p[i] = y[i] + s;
    const double fp = f.value(p);
    p[i] = y[i] - s;
    const double fm = f.value(p);
    p[i] = y[i];
    g[i] = (fp - fm) / (2.0 * s);
  }
  return g;
}

/// Directional derivative of the gradient: (grad f(y+ev) - grad f(y-ev)) / 2e.
inline Vector fd_hessian_vec(const mlopt::Objective& f, const Vector& y, const Vector& v, double eps = 1e-6) {
  return (f.gradient(y + eps * v) - f.gradient(y - eps * v)) / (2.0 * eps);
}

/// Dense Hessian assembled column by column from Hessian-vector products.
inline Dense hessian_from_products(const mlopt::Objective& f, const Vector& y) {
  const Index n = f.dim();
  Dense h(n, n);
  for (Index j = 0; j < n; ++j) h.col(j) = f.hessian_vec(y, Vector::Unit(n, j));
  return h;
}

inline double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

struct Spectrum {
  double min;
  double max;
};

inline Spectrum symmetric_spectrum(const Dense& m) {
  Eigen::SelfAdjointEigenSolver<Dense> es(m);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

/// Random symmetric matrix with eigenvalues in [lo, hi].
inline Dense random_spd(std::mt19937_64& rng, Index n, double lo, double hi) {
  Dense g(n, n);
  std::normal_distribution<double> nd;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = nd(rng);
  Eigen::HouseholderQR<Dense> qr(g);
  const Dense q = qr.householderQ();
  Vector ev = random_vector(rng, n, lo, hi);
  ev[0] = lo;
  ev[n - 1] = hi;
  return q * ev.asDiagonal() * q.transpose();
}

}  // namespace oracle
