#pragma once

#include <string_view>

#include "mlopt/coarse_model.hpp"
#include "mlopt/objective.hpp"

namespace mlopt {

/// Line-search parameters. `rho1` is the sufficient-decrease constant (also
/// called c1 in the Wolfe setting); `c2` is only used by the Wolfe search.
struct LineSearchConfig {
  double rho1 = 1e-4;
  double c2 = 0.9;
  double beta = 0.5;
  double alpha0 = 1.0;
  int max_trials = 50;

  /// Requires 0 < rho1 < 0.5, rho1 < c2 < 1, 0 < beta < 1, alpha0 > 0 and
  /// max_trials > 0; throws std::invalid_argument otherwise.
  void validate() const;
};

enum class StepFlag {
  accepted,
  max_trials_exceeded,
  bracket_failure,
  no_progress,
};

std::string_view to_string(StepFlag flag);

struct StepResult {
  double alpha = 0.0;
  int trials = 0;
  double f_new = 0.0;
  StepFlag flag = StepFlag::max_trials_exceeded;
  /// Accepted point (y + alpha d, or its projection for the arc search).
  Vector y_new;
  /// Gradient at y_new when the search had to compute it (Wolfe), else empty.
  Vector grad_new;

  [[nodiscard]] bool ok() const { return flag == StepFlag::accepted; }
};

/// Backtracking: alpha = alpha0, beta alpha0, ... until
///   f(y + alpha d) <= f(y) + rho1 alpha <grad f(y), d>.
/// Throws std::invalid_argument if g_dot_d >= 0.
StepResult armijo_backtracking(const Objective& f, const Vector& y, double f_y, const Vector& d,
                               double g_dot_d, const LineSearchConfig& cfg);

/// Strong Wolfe search (bracketing, then bisection zoom):
///   f(y + alpha d) <= f(y) + rho1 alpha g.d   and   |grad f(y + alpha d).d| <= c2 |g.d|.
/// Throws std::invalid_argument if grad_y.d >= 0.
StepResult wolfe(const Objective& f, const Vector& y, double f_y, const Vector& grad_y,
                 const Vector& d, const LineSearchConfig& cfg);

/// Armijo rule along the projection arc y(alpha) = Pi[y + alpha d]:
///   f(y(alpha)) <= f(y) + rho1 <grad f(y), y(alpha) - y>.
/// `y` must lie in the box. If the arc is stuck at y (d points out of the box
/// in every free coordinate) the result carries StepFlag::no_progress.
StepResult projected_armijo_arc(const Objective& f, const Box& box, const Vector& y, double f_y,
                                const Vector& grad_y, const Vector& d, const LineSearchConfig& cfg);

}  // namespace mlopt
