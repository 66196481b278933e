#include "mlopt/line_search.hpp"

#include <cmath>
#include <limits>

namespace mlopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Trial points outside the objective's domain count as rejected trials.
double safe_value(const Objective& f, const Vector& y) {
  try {
    const double v = f.value(y);
    return std::isfinite(v) ? v : kInf;
  } catch (const DomainError&) {
    return kInf;
  }
}

}  // namespace

void LineSearchConfig::validate() const {
  if (!(rho1 > 0.0 && rho1 < 0.5)) throw std::invalid_argument("line search: rho1 must be in (0, 0.5)");
  if (!(c2 > rho1 && c2 < 1.0)) throw std::invalid_argument("line search: c2 must be in (rho1, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("line search: beta must be in (0, 1)");
  if (!(alpha0 > 0.0)) throw std::invalid_argument("line search: alpha0 must be positive");
  if (max_trials <= 0) throw std::invalid_argument("line search: max_trials must be positive");
}

std::string_view to_string(StepFlag flag) {
  switch (flag) {
    case StepFlag::accepted: return "accepted";
    case StepFlag::max_trials_exceeded: return "max_trials_exceeded";
    case StepFlag::bracket_failure: return "bracket_failure";
    case StepFlag::no_progress: return "no_progress";
  }
  return "unknown";
}

StepResult armijo_backtracking(const Objective& f, const Vector& y, double f_y, const Vector& d,
                               double g_dot_d, const LineSearchConfig& cfg) {
  require_size(d, y.size(), "armijo_backtracking direction");
  if (!(g_dot_d < 0.0)) throw std::invalid_argument("armijo_backtracking: not a descent direction");

  StepResult res;
  double alpha = cfg.alpha0;
  for (int trial = 1; trial <= cfg.max_trials; ++trial) {
    Vector candidate = y + alpha * d;
    const double fc = safe_value(f, candidate);
    res.trials = trial;
    if (fc <= f_y + cfg.rho1 * alpha * g_dot_d) {
      res.alpha = alpha;
      res.f_new = fc;
      res.flag = StepFlag::accepted;
      res.y_new = std::move(candidate);
      return res;
    }
    alpha *= cfg.beta;
  }
  res.alpha = alpha / cfg.beta;
  res.f_new = f_y;
  res.flag = StepFlag::max_trials_exceeded;
  res.y_new = y;
  return res;
}

StepResult wolfe(const Objective& f, const Vector& y, double f_y, const Vector& grad_y, const Vector& d,
                 const LineSearchConfig& cfg) {
  require_size(d, y.size(), "wolfe direction");
  const double slope0 = grad_y.dot(d);
  if (!(slope0 < 0.0)) throw std::invalid_argument("wolfe: not a descent direction");

  StepResult res;
  int trials = 0;
  auto armijo_ok = [&](double alpha, double fa) { return fa <= f_y + cfg.rho1 * alpha * slope0; };
  auto curvature_ok = [&](double slope) { return std::abs(slope) <= -cfg.c2 * slope0; };
  auto accept = [&](double alpha, double fa, Vector point, Vector grad) {
    res.alpha = alpha;
    res.f_new = fa;
    res.flag = StepFlag::accepted;
    res.trials = trials;
    res.y_new = std::move(point);
    res.grad_new = std::move(grad);
    return res;
  };

  // Zoom on [lo, hi] by bisection; lo always satisfies the Armijo condition
  // and has the lower objective value of the two ends.
  auto zoom = [&](double lo, double f_lo, double hi) -> StepResult {
    while (trials < cfg.max_trials) {
      const double alpha = 0.5 * (lo + hi);
      Vector point = y + alpha * d;
      const double fa = safe_value(f, point);
      ++trials;
      if (!armijo_ok(alpha, fa) || fa >= f_lo) {
        hi = alpha;
        continue;
      }
      Vector grad = f.gradient(point);
      const double slope = grad.dot(d);
      if (curvature_ok(slope)) return accept(alpha, fa, std::move(point), std::move(grad));
      if (slope * (hi - lo) >= 0.0) hi = lo;
      lo = alpha;
      f_lo = fa;
      if (lo == hi) break;
    }
    res.alpha = lo;
    res.f_new = f_lo;
    res.trials = trials;
    res.flag = trials >= cfg.max_trials ? StepFlag::max_trials_exceeded : StepFlag::bracket_failure;
    res.y_new = y + lo * d;
    return res;
  };

  constexpr double kAlphaMax = 1e10;
  double prev_alpha = 0.0;
  double prev_f = f_y;
  double alpha = cfg.alpha0;
  while (trials < cfg.max_trials) {
    Vector point = y + alpha * d;
    const double fa = safe_value(f, point);
    ++trials;
    if (!armijo_ok(alpha, fa) || (prev_alpha > 0.0 && fa >= prev_f)) {
      return zoom(prev_alpha, prev_f, alpha);
    }
    Vector grad = f.gradient(point);
    const double slope = grad.dot(d);
    if (curvature_ok(slope)) return accept(alpha, fa, std::move(point), std::move(grad));
    if (slope >= 0.0) return zoom(alpha, fa, prev_alpha);
    prev_alpha = alpha;
    prev_f = fa;
    if (alpha >= kAlphaMax) break;
    alpha = std::min(2.0 * alpha, kAlphaMax);
  }
  res.alpha = prev_alpha;
  res.f_new = prev_f;
  res.trials = trials;
  res.flag = trials >= cfg.max_trials ? StepFlag::max_trials_exceeded : StepFlag::bracket_failure;
  res.y_new = y + prev_alpha * d;
  return res;
}

StepResult projected_armijo_arc(const Objective& f, const Box& box, const Vector& y, double f_y,
                                const Vector& grad_y, const Vector& d, const LineSearchConfig& cfg) {
  require_size(d, y.size(), "projected_armijo_arc direction");
  if (!box.contains(y)) throw DomainError("projected_armijo_arc: start point is infeasible");

  StepResult res;
  double alpha = cfg.alpha0;
  for (int trial = 1; trial <= cfg.max_trials; ++trial) {
    Vector candidate = box.project(y + alpha * d);
    res.trials = trial;
    if (trial == 1 && candidate == y) {
      // Every alpha projects back onto y.
      res.alpha = alpha;
      res.f_new = f_y;
      res.flag = StepFlag::no_progress;
      res.y_new = y;
      return res;
    }
    const double fc = safe_value(f, candidate);
    if (fc <= f_y + cfg.rho1 * grad_y.dot(candidate - y)) {
      res.alpha = alpha;
      res.f_new = fc;
      res.flag = StepFlag::accepted;
      res.y_new = std::move(candidate);
      return res;
    }
    alpha *= cfg.beta;
  }
  res.alpha = alpha / cfg.beta;
  res.f_new = f_y;
  res.flag = StepFlag::max_trials_exceeded;
  res.y_new = y;
  return res;
}

}  // namespace mlopt
