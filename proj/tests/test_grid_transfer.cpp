#include <doctest.h>

#include <random>

#include "mlopt/grid_transfer.hpp"
#include "support/oracles.hpp"

using namespace mlopt;

namespace {

Vector impulse(Index n, Index at) { return Vector::Unit(n, at); }

}  // namespace

TEST_CASE("full weighting on a 4x4 grid has the expected shapes and Galerkin factor") {
  const TransferPair t = build_full_weighting(Grid2D(4));
  CHECK(t.restriction().rows() == 4);
  CHECK(t.restriction().cols() == 16);
  CHECK(t.prolongation().rows() == 16);
  CHECK(t.prolongation().cols() == 4);
  CHECK(t.galerkin_factor() == 0.25);
  CHECK(t.galerkin_residual() == 0.0);
  const oracle::Dense diff = oracle::dense(t.restriction()) - 0.25 * oracle::dense(t.prolongation()).transpose();
  CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("restriction preserves constants and every row sums to one") {
  for (int side : {4, 8, 16, 32}) {
    const TransferPair t = build_full_weighting(Grid2D(side));
    const Vector ones = Vector::Ones(t.fine_dim());
    CHECK((t.restrict(ones) - Vector::Ones(t.coarse_dim())).cwiseAbs().maxCoeff() <= 1e-12);
    const oracle::Dense r = oracle::dense(t.restriction());
    CHECK((r.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(t.galerkin_residual() <= 1e-12);
  }
  const TransferPair t = build_full_weighting(Grid2D(4));
  CHECK(t.restrict(Vector::Zero(16)).isZero(0.0));
}

TEST_CASE("restriction stencil and impulse responses") {
  const int side = 8;
  const TransferPair t = build_full_weighting(Grid2D(side));
  const oracle::Dense r = oracle::dense(t.restriction());

  // Interior coarse point (1,1) sits on fine pixel (2,2).
  const Index coarse = 1 * 4 + 1;
  auto w = [&](int fr, int fc) { return r(coarse, Index(fr) * side + fc); };
  CHECK(w(2, 2) == doctest::Approx(4.0 / 16));
  CHECK(w(1, 2) == doctest::Approx(2.0 / 16));
  CHECK(w(3, 2) == doctest::Approx(2.0 / 16));
  CHECK(w(2, 1) == doctest::Approx(2.0 / 16));
  CHECK(w(2, 3) == doctest::Approx(2.0 / 16));
  CHECK(w(1, 1) == doctest::Approx(1.0 / 16));
  CHECK(w(3, 3) == doctest::Approx(1.0 / 16));
  CHECK(w(1, 3) == doctest::Approx(1.0 / 16));
  CHECK(w(3, 1) == doctest::Approx(1.0 / 16));
  CHECK(r.row(coarse).cwiseAbs().sum() == doctest::Approx(1.0));

  // A pixel aligned with a coarse point only feeds that point.
  const Vector hit = t.restrict(impulse(t.fine_dim(), 2 * side + 2));
  CHECK(hit[coarse] == doctest::Approx(4.0 / 16));
  CHECK(hit.cwiseAbs().sum() == doctest::Approx(4.0 / 16));

  // A pixel between two coarse points along a row splits 2/16 to each.
  const Vector split = t.restrict(impulse(t.fine_dim(), 2 * side + 3));
  CHECK(split[1 * 4 + 1] == doctest::Approx(2.0 / 16));
  CHECK(split[1 * 4 + 2] == doctest::Approx(2.0 / 16));
  CHECK(split.cwiseAbs().sum() == doctest::Approx(4.0 / 16));
}

TEST_CASE("prolongation of coarse constants is constant in the interior") {
  for (int side : {4, 8, 16}) {
    const TransferPair t = build_full_weighting(Grid2D(side));
    const Vector fine = t.prolong(Vector::Ones(t.coarse_dim()));
    for (int r = 1; r < side - 1; ++r) {
      for (int c = 1; c < side - 1; ++c) CHECK(fine[Index(r) * side + c] == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(t.prolong(Vector::Zero(t.coarse_dim())).isZero(0.0));
  }
  std::mt19937_64 rng(3);
  const TransferPair t = build_full_weighting(Grid2D(8));
  CHECK(t.restrict(t.prolong(oracle::random_vector(rng, t.coarse_dim()))).size() == t.coarse_dim());
}

TEST_CASE("adjoint identity <Px, y> = (1/c) <x, Ry>") {
  std::mt19937_64 rng(11);
  for (int side : {4, 8, 16}) {
    const TransferPair t = build_full_weighting(Grid2D(side));
    for (int k = 0; k < 100; ++k) {
      const Vector x = oracle::random_vector(rng, t.coarse_dim());
      const Vector y = oracle::random_vector(rng, t.fine_dim());
      const double lhs = t.prolong(x).dot(y);
      const double rhs = x.dot(t.restrict(y)) / t.galerkin_factor();
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("omega agrees with a dense SVD and P has full column rank") {
  for (int side : {4, 8, 16}) {
    const TransferPair t = build_full_weighting(Grid2D(side));
    const double r_svd = oracle::largest_singular_value(oracle::dense(t.restriction()));
    const double p_svd = oracle::largest_singular_value(oracle::dense(t.prolongation()));
    CHECK(t.restriction_norm() == doctest::Approx(r_svd).epsilon(1e-8));
    CHECK(t.prolongation_norm() == doctest::Approx(p_svd).epsilon(1e-8));
    CHECK(std::abs(t.omega() - std::max(r_svd, p_svd)) <= 1e-8);
    CHECK(t.norms_converged());
    CHECK(oracle::rank(oracle::dense(t.prolongation())) == t.coarse_dim());
    const oracle::Dense p = oracle::dense(t.prolongation());
    CHECK(t.p_inf_norm() == doctest::Approx(p.cwiseAbs().rowwise().sum().maxCoeff()));
  }
}

TEST_CASE("full weighting rejects odd or too small grids") {
  CHECK_THROWS_AS(build_full_weighting(Grid2D(2)), std::invalid_argument);
  CHECK_THROWS_AS(build_full_weighting(Grid2D(7)), std::invalid_argument);
  CHECK_THROWS_AS((void)Grid2D(6).coarser().coarser(), std::invalid_argument);
  CHECK(Grid2D(8).coarser() == Grid2D(4));
  CHECK_THROWS_AS(build_full_weighting_1d(5), std::invalid_argument);
}

TEST_CASE("dimension mismatches are reported") {
  const TransferPair t = build_full_weighting(Grid2D(4));
  CHECK_THROWS_AS((void)t.restrict(Vector::Zero(15)), DimensionError);
  CHECK_THROWS_AS((void)t.prolong(Vector::Zero(5)), DimensionError);
  CHECK_THROWS_AS((void)t.prolong_adjoint(Vector::Zero(4)), DimensionError);
}

TEST_CASE("one-dimensional full weighting") {
  const TransferPair t = build_full_weighting_1d(8);
  CHECK(t.coarse_dim() == 4);
  CHECK(t.galerkin_factor() == 0.5);
  CHECK((t.restrict(Vector::Ones(8)) - Vector::Ones(4)).norm() <= 1e-12);
  CHECK(t.galerkin_residual() == 0.0);
}

TEST_CASE("operator_norm_2 on small matrices") {
  SparseMatrix id(4, 4);
  id.setIdentity();
  CHECK(operator_norm_2(id).value == doctest::Approx(1.0).epsilon(1e-12));

  oracle::Dense d = oracle::Dense::Zero(3, 3);
  d.diagonal() << 1, 2, 3;
  CHECK(operator_norm_2(SparseMatrix(d.sparseView())).value == doctest::Approx(3.0).epsilon(1e-10));

  oracle::Dense nil(2, 2);
  nil << 0, 1, 0, 0;
  const NormEstimate e = operator_norm_2(SparseMatrix(nil.sparseView()));
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.converged);

  CHECK_THROWS_AS(operator_norm_2(SparseMatrix(3, 3)), std::invalid_argument);

  // Close singular values converge slowly; a single iteration is flagged.
  oracle::Dense close = oracle::Dense::Zero(2, 2);
  close.diagonal() << 1.0, 0.999;
  const NormEstimate rough = operator_norm_2(SparseMatrix(close.sparseView()), 1e-15, 1);
  CHECK_FALSE(rough.converged);
  CHECK(rough.value <= 1.0 + 1e-12);
  CHECK(rough.value > 0.99);

  // Same seed, same answer.
  const SparseMatrix p = build_full_weighting(Grid2D(16)).prolongation();
  CHECK(operator_norm_2(p).value == operator_norm_2(p).value);
}
