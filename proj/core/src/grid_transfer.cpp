#include "mlopt/grid_transfer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace mlopt {

Grid2D Grid2D::coarser() const {
  if (!can_coarsen()) {
    throw std::invalid_argument("Grid2D: side " + std::to_string(side) +
                                " cannot be coarsened (need even side >= 4)");
  }
  return Grid2D(side / 2);
}

NormEstimate operator_norm_2(const SparseMatrix& m, double tol, int max_iterations) {
  if (m.nonZeros() == 0 || m.norm() == 0.0) {
    throw std::invalid_argument("operator_norm_2: matrix is zero");
  }
  std::mt19937_64 rng(kPowerIterationSeed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(m.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = dist(rng);
  v.normalize();

  NormEstimate est;
  double lambda = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Vector w = m * v;
    const double next = w.squaredNorm();
    Vector z = m.transpose() * w;
    const double zn = z.norm();
    est.iterations = it;
    if (zn == 0.0) {
      // v landed in the null space of M^T M; the estimate is the current one.
      lambda = next;
      est.converged = true;
      break;
    }
    v = z / zn;
    if (it > 1 && std::abs(next - lambda) <= tol * next) {
      lambda = next;
      est.converged = true;
      break;
    }
    lambda = next;
  }
  // The final Rayleigh quotient ||M v||^2 with the updated v is at least as good.
  lambda = std::max(lambda, (m * v).squaredNorm());
  est.value = std::sqrt(lambda);
  return est;
}

namespace {

double inf_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (Index row = 0; row < m.outerSize(); ++row) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(m, row); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

// 1D full-weighting restriction rows (coarse_size x fine_size) with the
// index -1 leg replicated onto 0.
std::vector<Eigen::Triplet<double>> fw_1d_triplets(Index fine_size) {
  const Index coarse_size = fine_size / 2;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(std::size_t(3 * coarse_size));
  for (Index i = 0; i < coarse_size; ++i) {
    const Index centre = 2 * i;
    const Index left = std::max<Index>(centre - 1, 0);
    t.emplace_back(i, left, 0.25);
    t.emplace_back(i, centre, 0.5);
    t.emplace_back(i, centre + 1, 0.25);
  }
  return t;
}

SparseMatrix fw_1d_restriction(Index fine_size) {
  SparseMatrix r(fine_size / 2, fine_size);
  const auto t = fw_1d_triplets(fine_size);
  r.setFromTriplets(t.begin(), t.end());  // duplicates (clamped leg) are summed
  return r;
}

}  // namespace

TransferPair::TransferPair(SparseMatrix prolongation, double galerkin_factor)
    : p_(std::move(prolongation)), c_(galerkin_factor) {
  if (!(c_ > 0.0)) throw std::invalid_argument("TransferPair: Galerkin factor must be positive");
  if (p_.rows() == 0 || p_.cols() == 0) throw std::invalid_argument("TransferPair: empty prolongation");
  p_.makeCompressed();
  r_ = SparseMatrix(c_ * SparseMatrix(p_.transpose()));
  r_.makeCompressed();

  const NormEstimate rn = operator_norm_2(r_);
  const NormEstimate pn = operator_norm_2(p_);
  r_norm_ = rn.value;
  p_norm_ = pn.value;
  omega_ = std::max(r_norm_, p_norm_);
  norms_converged_ = rn.converged && pn.converged;
  p_inf_norm_ = inf_norm(p_);
}

Vector TransferPair::restrict(const Vector& fine) const {
  require_size(fine, fine_dim(), "restrict");
  return r_ * fine;
}

Vector TransferPair::prolong(const Vector& coarse) const {
  require_size(coarse, coarse_dim(), "prolong");
  return p_ * coarse;
}

Vector TransferPair::prolong_adjoint(const Vector& fine) const {
  require_size(fine, fine_dim(), "prolong_adjoint");
  return p_.transpose() * fine;
}

double TransferPair::galerkin_residual() const {
  const SparseMatrix diff = r_ - SparseMatrix(c_ * SparseMatrix(p_.transpose()));
  double worst = 0.0;
  for (Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

TransferPair build_full_weighting(Grid2D fine) {
  if (fine.side % 2 != 0 || fine.side < 4) {
    throw std::invalid_argument("build_full_weighting: side must be even and >= 4, got " +
                                std::to_string(fine.side));
  }
  const Index n1 = fine.side;
  const Index c1 = n1 / 2;
  const SparseMatrix r1 = fw_1d_restriction(n1);

  // R = R1 (rows) (x) R1 (cols), index = row * side + col.
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(std::size_t(9 * c1 * c1));
  for (Index ci = 0; ci < c1; ++ci) {
    for (SparseMatrix::InnerIterator a(r1, ci); a; ++a) {
      for (Index cj = 0; cj < c1; ++cj) {
        for (SparseMatrix::InnerIterator b(r1, cj); b; ++b) {
          t.emplace_back(ci * c1 + cj, a.col() * n1 + b.col(), a.value() * b.value());
        }
      }
    }
  }
  SparseMatrix r(c1 * c1, n1 * n1);
  r.setFromTriplets(t.begin(), t.end());
  SparseMatrix p = SparseMatrix(4.0 * SparseMatrix(r.transpose()));
  return TransferPair(std::move(p), 0.25);
}

TransferPair build_full_weighting_1d(Index fine_size) {
  if (fine_size % 2 != 0 || fine_size < 4) {
    throw std::invalid_argument("build_full_weighting_1d: size must be even and >= 4");
  }
  const SparseMatrix r1 = fw_1d_restriction(fine_size);
  SparseMatrix p = SparseMatrix(2.0 * SparseMatrix(r1.transpose()));
  return TransferPair(std::move(p), 0.5);
}

}  // namespace mlopt
