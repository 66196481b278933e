#include "mlopt/coarse_model.hpp"

#include <algorithm>
#include <cmath>

namespace mlopt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Box Box::unbounded(Index n) {
  return Box{Vector::Constant(n, -kInf), Vector::Constant(n, kInf)};
}

Box Box::lower_bounded(Index n, double l) {
  return Box{Vector::Constant(n, l), Vector::Constant(n, kInf)};
}

void Box::validate() const {
  if (lower.size() != upper.size()) throw DimensionError("Box: lower/upper sizes differ");
  for (Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) {
      throw std::invalid_argument("Box: lower > upper at index " + std::to_string(i));
    }
  }
}

bool Box::contains(const Vector& y, double tol) const {
  require_size(y, dim(), "Box::contains");
  for (Index i = 0; i < y.size(); ++i) {
    if (y[i] < lower[i] - tol || y[i] > upper[i] + tol) return false;
  }
  return true;
}

Vector Box::project(const Vector& y) const {
  require_size(y, dim(), "Box::project");
  return y.cwiseMax(lower).cwiseMin(upper);
}

double Box::projected_gradient_norm(const Vector& y, const Vector& g) const {
  return (project(y - g) - y).norm();
}

// --- geometric model -------------------------------------------------------

GeometricCoarseModel::GeometricCoarseModel(const Objective& coarse, const TransferPair& pair,
                                           Vector anchor, Vector shift)
    : coarse_(&coarse), pair_(&pair), anchor_(std::move(anchor)), shift_(std::move(shift)) {
  require_size(anchor_, coarse.dim(), "GeometricCoarseModel anchor");
  require_size(shift_, coarse.dim(), "GeometricCoarseModel shift");
}

double GeometricCoarseModel::value(const Vector& x) const {
  require_size(x, dim(), "psi");
  return coarse_->value(x) + shift_.dot(x - anchor_);
}

Vector GeometricCoarseModel::gradient(const Vector& x) const {
  require_size(x, dim(), "grad psi");
  return coarse_->gradient(x) + shift_;
}

Vector GeometricCoarseModel::hessian_vec(const Vector& x, const Vector& v) const {
  return coarse_->hessian_vec(x, v);
}

GeometricCoarseModel build_geometric(const Objective& coarse, const TransferPair& pair,
                                     const Vector& y_k, const Vector& grad_f) {
  require_size(y_k, pair.fine_dim(), "build_geometric y_k");
  require_size(grad_f, pair.fine_dim(), "build_geometric grad_f");
  if (coarse.dim() != pair.coarse_dim()) throw DimensionError("build_geometric: coarse objective size");
  Vector x_k = pair.restrict(y_k);
  Vector shift = pair.restrict(grad_f) - coarse.gradient(x_k);
  return GeometricCoarseModel(coarse, pair, std::move(x_k), std::move(shift));
}

GeometricCoarseModel build_geometric(const ObjectiveHierarchy& h, LevelIndex ell, const Vector& y_k,
                                     const Vector& grad_f) {
  return build_geometric(h.level_objective(ell.coarser()), h.transfer(ell), y_k, grad_f);
}

double bregman(const Objective& g, const Vector& x, const Vector& x_k) {
  require_size(x, g.dim(), "bregman x");
  require_size(x_k, g.dim(), "bregman x_k");
  return g.value(x) - g.value(x_k) - g.gradient(x_k).dot(x - x_k);
}

// --- algebraic model -------------------------------------------------------

AlgebraicCoarseModel::AlgebraicCoarseModel(const Objective& fine, const TransferPair& pair, Vector y_k,
                                           Vector anchor, Vector restricted_gradient)
    : fine_(&fine),
      pair_(&pair),
      y_k_(std::move(y_k)),
      anchor_(std::move(anchor)),
      r_k_(std::move(restricted_gradient)) {}

Vector AlgebraicCoarseModel::apply_q(const Vector& w) const {
  require_size(w, dim(), "Q_k");
  return pair_->restrict(fine_->hessian_vec(y_k_, pair_->prolong(w)));
}

double AlgebraicCoarseModel::value(const Vector& x) const {
  require_size(x, dim(), "phi");
  const Vector s = x - anchor_;
  return r_k_.dot(s) + 0.5 * s.dot(apply_q(s));
}

Vector AlgebraicCoarseModel::gradient(const Vector& x) const {
  require_size(x, dim(), "grad phi");
  return r_k_ + apply_q(x - anchor_);
}

Vector AlgebraicCoarseModel::hessian_vec(const Vector& /*x*/, const Vector& v) const {
  return apply_q(v);
}

AlgebraicCoarseModel build_algebraic(const Objective& fine, const TransferPair& pair, const Vector& y_k,
                                     const Vector& grad_f) {
  if (!fine.has_hessian_vec()) {
    throw CapabilityError("build_algebraic: fine objective has no Hessian-vector product");
  }
  require_size(y_k, pair.fine_dim(), "build_algebraic y_k");
  require_size(grad_f, pair.fine_dim(), "build_algebraic grad_f");
  Vector x_k = pair.restrict(y_k);
  Vector r_k = pair.restrict(grad_f);
  return AlgebraicCoarseModel(fine, pair, y_k, std::move(x_k), std::move(r_k));
}

AlgebraicCoarseModel build_algebraic(const ObjectiveHierarchy& h, LevelIndex ell, const Vector& y_k,
                                     const Vector& grad_f) {
  return build_algebraic(h.level_objective(ell), h.transfer(ell), y_k, grad_f);
}

// --- box -------------------------------------------------------------------

CoarseBox coarse_box(const TransferPair& pair, const Vector& y_k, const Box& box) {
  require_size(y_k, pair.fine_dim(), "coarse_box y_k");
  require_size(box.lower, pair.fine_dim(), "coarse_box lower");
  require_size(box.upper, pair.fine_dim(), "coarse_box upper");
  if (!box.contains(y_k)) throw DomainError("coarse_box: y_k is not inside the fine box");

  const SparseMatrix& p = pair.prolongation();
  const Index n_coarse = pair.coarse_dim();
  Vector lo = Vector::Constant(n_coarse, -kInf);
  Vector hi = Vector::Constant(n_coarse, kInf);
  for (Index i = 0; i < p.outerSize(); ++i) {
    const double to_lower = box.lower[i] - y_k[i];  // <= 0
    const double to_upper = box.upper[i] - y_k[i];  // >= 0
    for (SparseMatrix::InnerIterator it(p, i); it; ++it) {
      const Index j = it.col();
      if (it.value() > 0.0) {
        lo[j] = std::max(lo[j], to_lower);
        hi[j] = std::min(hi[j], to_upper);
      } else if (it.value() < 0.0) {
        lo[j] = std::max(lo[j], -to_upper);
        hi[j] = std::min(hi[j], -to_lower);
      }
    }
  }
  const Vector x_k = pair.restrict(y_k);
  const double scale = 1.0 / pair.p_inf_norm();
  CoarseBox out;
  out.lower = x_k + scale * lo;
  out.upper = x_k + scale * hi;
  return out;
}

Vector correction_direction(const TransferPair& pair, const Vector& x_plus, const Vector& x_k) {
  require_size(x_plus, pair.coarse_dim(), "correction_direction x_plus");
  require_size(x_k, pair.coarse_dim(), "correction_direction x_k");
  return pair.prolong(x_plus - x_k);
}

}  // namespace mlopt
