#pragma once

#include <limits>

#include "mlopt/grid_transfer.hpp"
#include "mlopt/objective.hpp"
#include "mlopt/types.hpp"

namespace mlopt {

/// Componentwise bounds l <= y <= u; infinite entries mean "unbounded".
struct Box {
  Vector lower;
  Vector upper;

  static Box unbounded(Index n);
  static Box lower_bounded(Index n, double l);

  [[nodiscard]] Index dim() const { return lower.size(); }
  /// Throws std::invalid_argument unless sizes agree and l <= u.
  void validate() const;
  [[nodiscard]] bool contains(const Vector& y, double tol = 0.0) const;
  /// Euclidean projection onto the box.
  [[nodiscard]] Vector project(const Vector& y) const;
  /// ||Pi[y - g] - y||, the projected-gradient residual.
  [[nodiscard]] double projected_gradient_norm(const Vector& y, const Vector& g) const;
};

/// Geometric coarse model
///   psi(x) = g(x) + <v, x - x_k>,  v = R grad f(y_k) - grad g(R y_k),
/// anchored at x_k = R y_k. By construction grad psi(x_k) = R grad f(y_k).
///
/// Holds references to g and the transfer pair; both must outlive the model.
class GeometricCoarseModel final : public Objective {
 public:
  GeometricCoarseModel(const Objective& coarse, const TransferPair& pair, Vector anchor, Vector shift);

  [[nodiscard]] Index dim() const override { return coarse_->dim(); }
  [[nodiscard]] double value(const Vector& x) const override;
  [[nodiscard]] Vector gradient(const Vector& x) const override;
  [[nodiscard]] bool has_hessian_vec() const override { return coarse_->has_hessian_vec(); }
  [[nodiscard]] Vector hessian_vec(const Vector& x, const Vector& v) const override;
  [[nodiscard]] bool is_quadratic() const override { return coarse_->is_quadratic(); }

  [[nodiscard]] const Vector& anchor() const { return anchor_; }
  [[nodiscard]] const Vector& shift() const { return shift_; }
  [[nodiscard]] const Objective& coarse_objective() const { return *coarse_; }
  [[nodiscard]] const TransferPair& transfer() const { return *pair_; }

 private:
  const Objective* coarse_;
  const TransferPair* pair_;
  Vector anchor_;
  Vector shift_;
};

/// Builds psi from the fine gradient at y_k. Costs exactly one gradient
/// evaluation of `coarse` (at R y_k).
GeometricCoarseModel build_geometric(const Objective& coarse, const TransferPair& pair,
                                     const Vector& y_k, const Vector& grad_f);
/// Same, with g taken from level ell+1 of the hierarchy (evaluations counted there).
GeometricCoarseModel build_geometric(const ObjectiveHierarchy& h, LevelIndex ell,
                                     const Vector& y_k, const Vector& grad_f);

/// Bregman divergence D_g(x, x_k) = g(x) - g(x_k) - <grad g(x_k), x - x_k>.
double bregman(const Objective& g, const Vector& x, const Vector& x_k);

/// Algebraic (Galerkin) coarse model
///   phi(x) = <R grad f(y_k), x - x_k> + 1/2 <x - x_k, Q (x - x_k)>,
///   Q w = R Hess f(y_k) P w,
/// applied matrix-free through the fine objective's Hessian-vector product.
class AlgebraicCoarseModel final : public Objective {
 public:
  AlgebraicCoarseModel(const Objective& fine, const TransferPair& pair, Vector y_k, Vector anchor,
                       Vector restricted_gradient);

  [[nodiscard]] Index dim() const override { return anchor_.size(); }
  [[nodiscard]] double value(const Vector& x) const override;
  [[nodiscard]] Vector gradient(const Vector& x) const override;
  [[nodiscard]] bool has_hessian_vec() const override { return true; }
  [[nodiscard]] Vector hessian_vec(const Vector& x, const Vector& v) const override;
  [[nodiscard]] bool is_quadratic() const override { return true; }

  /// Q w.
  [[nodiscard]] Vector apply_q(const Vector& w) const;
  [[nodiscard]] const Vector& anchor() const { return anchor_; }
  [[nodiscard]] const Vector& restricted_gradient() const { return r_k_; }

 private:
  const Objective* fine_;
  const TransferPair* pair_;
  Vector y_k_;
  Vector anchor_;
  Vector r_k_;
};

/// Throws CapabilityError when `fine` has no Hessian-vector product.
AlgebraicCoarseModel build_algebraic(const Objective& fine, const TransferPair& pair,
                                     const Vector& y_k, const Vector& grad_f);
AlgebraicCoarseModel build_algebraic(const ObjectiveHierarchy& h, LevelIndex ell,
                                     const Vector& y_k, const Vector& grad_f);

/// Coarse bounds keeping y_k + P (x - x_k) inside [l, u] for every x in
/// [lower, upper]. Entries with P_ij > 0 use (l - y_k)_i / (u - y_k)_i,
/// entries with P_ij < 0 use the swapped (y_k - u)_i / (y_k - l)_i, all scaled
/// by 1 / ||P||_inf.
struct CoarseBox {
  Vector lower;
  Vector upper;

  [[nodiscard]] Box as_box() const { return Box{lower, upper}; }
};

/// Throws DomainError if y_k is outside `box`.
CoarseBox coarse_box(const TransferPair& pair, const Vector& y_k, const Box& box);

/// d = P (x_plus - x_k).
Vector correction_direction(const TransferPair& pair, const Vector& x_plus, const Vector& x_k);

}  // namespace mlopt
