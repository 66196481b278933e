#include <doctest.h>

#include <cmath>
#include <random>

#include "mlopt/coarse_model.hpp"
#include "mlopt/line_search.hpp"
#include "mlopt/quadratic_problem.hpp"
#include "support/oracles.hpp"

using namespace mlopt;

namespace {

// f(y) = 1/2 sum (y_i - c_i)^2.
QuadraticObjective shifted_half_norm(const Vector& c) {
  return QuadraticObjective(oracle::Dense::Identity(c.size(), c.size()), c);
}

class Quartic final : public Objective {
 public:
  Index dim() const override { return 1; }
  double value(const Vector& y) const override { return 0.25 * std::pow(y[0], 4); }
  Vector gradient(const Vector& y) const override { return Vector::Constant(1, std::pow(y[0], 3)); }
};

Vector scalar(double v) { return Vector::Constant(1, v); }

}  // namespace

TEST_CASE("config ranges") {
  CHECK_NOTHROW(LineSearchConfig{}.validate());
  CHECK_THROWS_AS((LineSearchConfig{0.5, 0.9, 0.5, 1.0, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LineSearchConfig{1e-4, 1e-5, 0.5, 1.0, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LineSearchConfig{1e-4, 0.9, 1.0, 1.0, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LineSearchConfig{1e-4, 0.9, 0.5, 0.0, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LineSearchConfig{1e-4, 0.9, 0.5, 1.0, 0}.validate()), std::invalid_argument);
}

TEST_CASE("Armijo on 1/2 y^2 with rho1 = 0.25 holds up to alpha = 1.5 with equality") {
  const QuadraticObjective f = shifted_half_norm(Vector::Zero(1));
  const Vector y = scalar(1.0);
  const Vector d = scalar(-1.0);
  // Hand evaluation: f(1 - a) = (1 - a)^2 / 2 <= 1/2 - a/4 iff a <= 1.5.
  for (double a : {0.1, 0.5, 1.0, 1.5}) {
    LineSearchConfig cfg{0.25, 0.9, 0.5, a, 1};
    const StepResult r = armijo_backtracking(f, y, 0.5, d, -1.0, cfg);
    CHECK(r.ok());
    CHECK(r.trials == 1);
    CHECK(r.alpha == a);
  }
  const double eq = f.value(y + 1.5 * d);
  CHECK(eq == doctest::Approx(0.125));
  CHECK(eq <= 0.5 + 0.25 * 1.5 * -1.0);
  LineSearchConfig over{0.25, 0.9, 0.5, 1.6, 1};
  CHECK_FALSE(armijo_backtracking(f, y, 0.5, d, -1.0, over).ok());
  CHECK(armijo_backtracking(f, y, 0.5, d, -1.0, over).flag == StepFlag::max_trials_exceeded);
}

TEST_CASE("Armijo rejects non-descent directions") {
  const QuadraticObjective f = shifted_half_norm(Vector::Zero(1));
  CHECK_THROWS_AS(armijo_backtracking(f, scalar(1.0), 0.5, scalar(1.0), 1.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(armijo_backtracking(f, scalar(1.0), 0.5, scalar(0.0), 0.0, {}), std::invalid_argument);
}

TEST_CASE("tiny alpha0 along -grad is accepted at the first trial") {
  std::mt19937_64 rng(1);
  const QuadraticObjective f(oracle::random_spd(rng, 5, 1.0, 10.0), oracle::random_vector(rng, 5));
  const Vector y = oracle::random_vector(rng, 5);
  const Vector g = f.gradient(y);
  const StepResult r = armijo_backtracking(f, y, f.value(y), -g, -g.squaredNorm(), {1e-4, 0.9, 0.5, 1e-3, 50});
  CHECK(r.ok());
  CHECK(r.trials == 1);
}

TEST_CASE("accepted Armijo steps satisfy the condition and the lower bound") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const oracle::Dense q = oracle::random_spd(rng, 6, 0.1, 20.0);
    const double m_f = oracle::symmetric_spectrum(q).max;
    const QuadraticObjective f(q, oracle::random_vector(rng, 6));
    const Vector y = oracle::random_vector(rng, 6);
    const Vector g = f.gradient(y);
    Vector d = oracle::random_vector(rng, 6);
    if (g.dot(d) >= 0.0) d = -d;
    const LineSearchConfig cfg{1e-4, 0.9, 0.5, 1.0, 100};
    const double fy = f.value(y);
    const StepResult r = armijo_backtracking(f, y, fy, d, g.dot(d), cfg);
    REQUIRE(r.ok());
    CHECK(f.value(y + r.alpha * d) <= fy + cfg.rho1 * r.alpha * g.dot(d));
    const double bound = std::min(cfg.alpha0, 2.0 * cfg.beta * (cfg.rho1 - 1.0) * d.dot(g) / (m_f * d.squaredNorm()));
    CHECK(r.alpha >= bound);
    CHECK(r.alpha <= cfg.alpha0);
  }
}

TEST_CASE("Wolfe on 1/2 y^2 returns the exact minimizer") {
  const QuadraticObjective f = shifted_half_norm(Vector::Zero(1));
  const Vector y = scalar(1.0);
  const StepResult r = wolfe(f, y, 0.5, f.gradient(y), scalar(-1.0), {});
  REQUIRE(r.ok());
  CHECK(r.alpha == 1.0);
  CHECK(r.f_new == 0.0);
  // Directional derivative at alpha is (alpha - 1).
  CHECK(std::abs(r.alpha - 1.0) <= 0.9 * 1.0);
  CHECK(r.grad_new.size() == 1);
}

TEST_CASE("Wolfe rejects a stationary direction") {
  const QuadraticObjective f = shifted_half_norm(Vector::Zero(1));
  CHECK_THROWS_AS(wolfe(f, scalar(0.0), 0.0, scalar(0.0), scalar(-1.0), {}), std::invalid_argument);
}

TEST_CASE("Wolfe on y^4 / 4 satisfies both strong Wolfe conditions") {
  const Quartic f;
  const LineSearchConfig cfg{};
  for (double a0 : {0.01, 0.3, 1.0, 5.0}) {
    LineSearchConfig c = cfg;
    c.alpha0 = a0;
    const Vector y = scalar(1.0);
    const Vector d = scalar(-1.0);
    const double slope0 = f.gradient(y).dot(d);
    const StepResult r = wolfe(f, y, f.value(y), f.gradient(y), d, c);
    REQUIRE(r.ok());
    const Vector yn = y + r.alpha * d;
    CHECK(f.value(yn) <= f.value(y) + c.rho1 * r.alpha * slope0);
    CHECK(std::abs(f.gradient(yn).dot(d)) <= c.c2 * std::abs(slope0));
  }
}

TEST_CASE("Wolfe expands on a long valley and zooms back") {
  const QuadraticObjective f = shifted_half_norm(Vector::Constant(1, 1000.0));
  const Vector y = scalar(0.0);
  const Vector g = f.gradient(y);
  const StepResult r = wolfe(f, y, f.value(y), g, scalar(1.0), {});
  REQUIRE(r.ok());
  CHECK(std::abs(r.y_new[0] - 1000.0) <= 0.9 * 1000.0);
  CHECK(r.alpha > 1.0);
}

TEST_CASE("projected arc: unbounded box matches plain backtracking") {
  std::mt19937_64 rng(3);
  const QuadraticObjective f(oracle::random_spd(rng, 4, 1.0, 50.0), oracle::random_vector(rng, 4));
  const Vector y = oracle::random_vector(rng, 4);
  const Vector g = f.gradient(y);
  const LineSearchConfig cfg{1e-4, 0.9, 0.5, 1.0, 60};
  const StepResult a = armijo_backtracking(f, y, f.value(y), -g, -g.squaredNorm(), cfg);
  const StepResult b = projected_armijo_arc(f, Box::unbounded(4), y, f.value(y), g, -g, cfg);
  CHECK(a.alpha == b.alpha);
  CHECK(a.trials == b.trials);
}

TEST_CASE("projected arc: outward direction at the bound makes no progress") {
  const QuadraticObjective f = shifted_half_norm(Vector::Constant(2, -1.0));
  const Box b{Vector::Zero(2), Vector::Ones(2)};
  const Vector y = Vector::Zero(2);
  const StepResult r = projected_armijo_arc(f, b, y, f.value(y), f.gradient(y), -f.gradient(y), {});
  CHECK(r.flag == StepFlag::no_progress);
  CHECK(r.y_new == y);
}

TEST_CASE("projected arc clips at the box face") {
  const QuadraticObjective f = shifted_half_norm(Vector{{2.0, 0.5}});
  const Box b{Vector::Zero(2), Vector::Ones(2)};
  const Vector y = Vector{{0.5, 0.5}};
  const Vector g = f.gradient(y);
  CHECK((-g - Vector{{1.5, 0.0}}).norm() == 0.0);
  const StepResult r = projected_armijo_arc(f, b, y, f.value(y), g, -g, {1e-4, 0.9, 0.8, 1.0, 60});
  REQUIRE(r.ok());
  CHECK((r.y_new - Vector{{1.0, 0.5}}).norm() <= 1e-15);
  CHECK_THROWS_AS(projected_armijo_arc(f, b, Vector{{2.0, 0.0}}, 0.0, g, -g, {}), DomainError);
}

TEST_CASE("projected arc outputs are always feasible") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const QuadraticObjective f(oracle::random_spd(rng, 5, 0.5, 5.0), oracle::random_vector(rng, 5, -5.0, 5.0));
    const Box b{Vector::Constant(5, -0.5), Vector::Constant(5, 0.5)};
    const Vector y = oracle::random_vector(rng, 5, -0.5, 0.5);
    const Vector g = f.gradient(y);
    const StepResult r = projected_armijo_arc(f, b, y, f.value(y), g, -g, {1e-4, 0.9, 0.8, 1.0, 60});
    CHECK(b.contains(r.y_new));
    if (r.ok()) CHECK(f.value(r.y_new) <= f.value(y) + 1e-4 * g.dot(r.y_new - y));
  }
}
