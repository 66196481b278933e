#pragma once

#include <cstdint>

#include "mlopt/types.hpp"

namespace mlopt {

/// Square 2D pixel grid with `side` pixels per dimension, stored row-major
/// (index = row * side + col).
struct Grid2D {
  constexpr explicit Grid2D(int s) : side(s) {}
  int side;

  [[nodiscard]] constexpr Index size() const { return Index(side) * side; }
  [[nodiscard]] constexpr bool can_coarsen() const { return side >= 4 && side % 2 == 0; }
  /// Grid with half the side length. Throws if the grid cannot be coarsened.
  [[nodiscard]] Grid2D coarser() const;

  friend constexpr bool operator==(Grid2D, Grid2D) = default;
};

/// Fixed start-vector seed for power iteration so norm estimates are
/// reproducible run to run.
inline constexpr std::uint64_t kPowerIterationSeed = 0x5eed'0f'0123ULL;

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Spectral norm ||M||_2 by power iteration on M^T M. Stops once the
/// Rayleigh quotient changes by less than `tol` relative. On non-convergence
/// the best estimate is returned with `converged == false`.
NormEstimate operator_norm_2(const SparseMatrix& m, double tol = 1e-12,
                             int max_iterations = 20000);

/// Restriction/prolongation pair coupled by the Galerkin condition R = c P^T.
///
/// The pair is immutable once built; the operator norms used by the
/// convergence constants (omega = max(||R||_2, ||P||_2) and ||P||_inf) are
/// computed at construction.
class TransferPair {
 public:
  /// Builds R = c * P^T from the prolongation.
  TransferPair(SparseMatrix prolongation, double galerkin_factor);

  [[nodiscard]] const SparseMatrix& restriction() const { return r_; }
  [[nodiscard]] const SparseMatrix& prolongation() const { return p_; }
  [[nodiscard]] double galerkin_factor() const { return c_; }
  [[nodiscard]] double omega() const { return omega_; }
  [[nodiscard]] double restriction_norm() const { return r_norm_; }
  [[nodiscard]] double prolongation_norm() const { return p_norm_; }
  [[nodiscard]] double p_inf_norm() const { return p_inf_norm_; }
  [[nodiscard]] bool norms_converged() const { return norms_converged_; }

  [[nodiscard]] Index fine_dim() const { return p_.rows(); }
  [[nodiscard]] Index coarse_dim() const { return p_.cols(); }

  /// R v.
  [[nodiscard]] Vector restrict(const Vector& fine) const;
  /// P x.
  [[nodiscard]] Vector prolong(const Vector& coarse) const;
  /// P^T v (used by the coarse-correction gate).
  [[nodiscard]] Vector prolong_adjoint(const Vector& fine) const;

  /// max |R - c P^T| over all entries.
  [[nodiscard]] double galerkin_residual() const;

 private:
  SparseMatrix p_;
  SparseMatrix r_;
  double c_;
  double r_norm_ = 0.0;
  double p_norm_ = 0.0;
  double omega_ = 0.0;
  double p_inf_norm_ = 0.0;
  bool norms_converged_ = false;
};

/// Full-weighting restriction R = (1/16)[1 2 1; 2 4 2; 1 2 1] with P = 4 R^T
/// (so c = 1/4). Coarse point (I, J) sits on fine pixel (2I, 2J); the
/// out-of-range stencil leg at index -1 is replicated onto index 0 so every
/// row of R sums to one.
TransferPair build_full_weighting(Grid2D fine);

/// Same stencil in one dimension: R = (1/4)[1 2 1], P = 2 R^T (c = 1/2).
TransferPair build_full_weighting_1d(Index fine_size);

}  // namespace mlopt
