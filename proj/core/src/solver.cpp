#include "mlopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

namespace mlopt {

std::string_view to_string(FineMethod m) {
  switch (m) {
    case FineMethod::gradient_descent: return "gradient_descent";
    case FineMethod::projected_gd: return "projected_gd";
    case FineMethod::lbfgs: return "lbfgs";
  }
  return "unknown";
}

std::string_view to_string(CoarseSolve s) {
  switch (s) {
    case CoarseSolve::exact_quadratic: return "exact_quadratic";
    case CoarseSolve::gradient_iterations: return "gradient_iterations";
  }
  return "unknown";
}

std::string_view to_string(CoarseModelKind k) {
  switch (k) {
    case CoarseModelKind::geometric: return "geometric";
    case CoarseModelKind::algebraic: return "algebraic";
  }
  return "unknown";
}

std::string_view to_string(LineSearchKind k) {
  switch (k) {
    case LineSearchKind::wolfe: return "wolfe";
    case LineSearchKind::armijo: return "armijo";
  }
  return "unknown";
}

std::string_view to_string(BoxCoarseStep s) {
  switch (s) {
    case BoxCoarseStep::projected_arc: return "projected_arc";
    case BoxCoarseStep::unit: return "unit";
  }
  return "unknown";
}

std::string_view to_string(StepType t) {
  switch (t) {
    case StepType::init: return "init";
    case StepType::coarse: return "coarse";
    case StepType::fine: return "fine";
  }
  return "unknown";
}

std::string_view to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iterations: return "max_iterations";
    case SolverStatus::stalled: return "stalled";
    case SolverStatus::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

// --- config ------------------------------------------------------------------

int SolverConfig::coarse_iters(std::size_t level) const {
  return level < coarse_iters_per_level.size() ? coarse_iters_per_level[level] : 1;
}

int SolverConfig::fine_steps(std::size_t level) const {
  if (level == 0) return 1;
  return level < fine_steps_per_level.size() ? fine_steps_per_level[level] : (1 << std::min<std::size_t>(level, 20));
}

void SolverConfig::validate(const ObjectiveHierarchy& h, bool constrained) const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("SolverConfig: " + msg); };
  if (levels < 1 || static_cast<std::size_t>(levels) > h.num_levels()) {
    fail("levels must be in [1, " + std::to_string(h.num_levels()) + "]");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must be in (0, 1)");
  for (int l = 0; l + 1 < levels; ++l) {
    const double p_norm = h.transfer(LevelIndex(std::size_t(l))).prolongation_norm();
    const double upper = std::min(1.0, p_norm);
    if (!(kappa > 0.0 && kappa < upper)) {
      std::ostringstream msg;
      msg << "kappa must be in (0, min(1, ||P||) = " << upper << ") for level " << l;
      fail(msg.str());
    }
  }
  if (levels == 1 && !(kappa > 0.0 && kappa < 1.0)) fail("kappa must be in (0, 1)");
  if (max_outer < 0) fail("max_outer must be non-negative");
  if (lbfgs_pairs <= 0) fail("lbfgs_pairs must be positive");
  for (int v : coarse_iters_per_level) {
    if (v <= 0) fail("coarse_iters_per_level entries must be positive");
  }
  for (int v : fine_steps_per_level) {
    if (v <= 0) fail("fine_steps_per_level entries must be positive");
  }
  if (!(tol_rel >= 0.0) || !(tol_abs >= 0.0)) fail("tolerances must be non-negative");
  if (exact_max_iters < 0) fail("exact_max_iters must be non-negative");
  unconstrained_search.validate();
  projected_search.validate();
  if (constrained && fine_method == FineMethod::gradient_descent) {
    fail("box-constrained runs need fine_method projected_gd or lbfgs");
  }
  if (!constrained && fine_method == FineMethod::projected_gd) {
    fail("projected_gd needs a box");
  }
  if (levels > 1 && coarse_model == CoarseModelKind::algebraic && !h.has_hessian_vec(LevelIndex(0))) {
    fail("the algebraic coarse model needs Hessian-vector products at level 0");
  }
}

// --- trace -------------------------------------------------------------------

std::vector<TraceRow> ConvergenceTrace::level_rows(int level) const {
  std::vector<TraceRow> out;
  for (const auto& r : rows_) {
    if (r.level == level) out.push_back(r);
  }
  return out;
}

int ConvergenceTrace::count(int level, StepType type) const {
  return static_cast<int>(std::count_if(rows_.begin(), rows_.end(), [&](const TraceRow& r) {
    return r.level == level && r.step_type == type;
  }));
}

void ConvergenceTrace::write_csv(std::ostream& out) const {
  out << kHeader << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& r : rows_) {
    out << r.k << ',' << r.level << ',' << to_string(r.step_type) << ',' << r.f << ',' << r.grad_norm << ','
        << r.step_size << ',' << r.grad_evals << ',' << r.wall_s << '\n';
  }
  out.precision(old_precision);
}

// --- gates -------------------------------------------------------------------

bool coarse_condition_unconstrained(const Vector& grad_f, const TransferPair& pair, double kappa,
                                    double epsilon) {
  const double pt = pair.prolong_adjoint(grad_f).norm();
  return pt >= kappa * grad_f.norm() && pt > epsilon;
}

BoxGate coarse_condition_box(const Vector& y_k, const Vector& grad_f, const Box& fine_box, const Vector& x_k,
                             const Vector& coarse_grad, const Box& coarse_box, double kappa) {
  BoxGate gate;
  gate.a = fine_box.projected_gradient_norm(y_k, grad_f);
  gate.b = coarse_box.projected_gradient_norm(x_k, coarse_grad);
  gate.use_coarse = gate.b >= kappa * gate.a;
  return gate;
}

// --- fine steps ----------------------------------------------------------------

FineStepResult fine_step_gd(const Objective& f, const Vector& y, double f_y, const Vector& g,
                            LineSearchKind search, const LineSearchConfig& cfg) {
  FineStepResult out;
  out.y = y;
  out.f = f_y;
  out.grad = g;
  const double gg = g.squaredNorm();
  if (gg == 0.0) {
    out.stationary = true;
    return out;
  }
  const Vector d = -g;
  StepResult res;
  if (search == LineSearchKind::wolfe) {
    res = wolfe(f, y, f_y, g, d, cfg);
    if (!res.ok()) res = armijo_backtracking(f, y, f_y, d, -gg, cfg);
  } else {
    res = armijo_backtracking(f, y, f_y, d, -gg, cfg);
  }
  out.flag = res.flag;
  out.alpha = res.alpha;
  if (!res.ok()) return out;
  out.y = std::move(res.y_new);
  out.f = res.f_new;
  out.grad = res.grad_new.size() == out.y.size() ? std::move(res.grad_new) : f.gradient(out.y);
  return out;
}

FineStepResult fine_step_pgd(const Objective& f, const Box& box, const Vector& y, double f_y, const Vector& g,
                             const LineSearchConfig& cfg) {
  FineStepResult out;
  out.y = y;
  out.f = f_y;
  out.grad = g;
  if (box.projected_gradient_norm(y, g) == 0.0) {
    out.stationary = true;
    return out;
  }
  StepResult res = projected_armijo_arc(f, box, y, f_y, g, -g, cfg);
  out.flag = res.flag;
  out.alpha = res.alpha;
  if (!res.ok()) return out;
  out.y = std::move(res.y_new);
  out.f = res.f_new;
  out.grad = f.gradient(out.y);
  return out;
}

FineStepResult fine_step_lbfgs(const Objective& f, LbfgsMemory& memory, const Box* box, const Vector& y,
                               double f_y, const Vector& g, const LineSearchConfig& wolfe_cfg,
                               const LineSearchConfig& arc_cfg) {
  FineStepResult out;
  out.y = y;
  out.f = f_y;
  out.grad = g;
  const double crit = box ? box->projected_gradient_norm(y, g) : g.norm();
  if (crit == 0.0) {
    out.stationary = true;
    return out;
  }

  auto search = [&](const Vector& d, bool steepest) {
    if (box) {
      LineSearchConfig c = arc_cfg;
      if (steepest) c.alpha0 = std::min(c.alpha0, 1.0 / g.lpNorm<Eigen::Infinity>());
      return projected_armijo_arc(f, *box, y, f_y, g, d, c);
    }
    LineSearchConfig c = wolfe_cfg;
    if (steepest) c.alpha0 = std::min(c.alpha0, 1.0 / g.norm());
    StepResult r = wolfe(f, y, f_y, g, d, c);
    if (!r.ok()) r = armijo_backtracking(f, y, f_y, d, g.dot(d), c);
    return r;
  };

  Vector d = memory.direction(g);
  bool steepest = memory.size() == 0;
  if (!(g.dot(d) < 0.0)) {
    memory.reset();
    d = -g;
    steepest = true;
  }
  StepResult res = search(d, steepest);
  if (!res.ok() && !steepest) {
    memory.reset();
    res = search(-g, true);
  }
  out.flag = res.flag;
  out.alpha = res.alpha;
  if (!res.ok()) return out;
  out.y = std::move(res.y_new);
  out.f = res.f_new;
  out.grad = res.grad_new.size() == out.y.size() ? std::move(res.grad_new) : f.gradient(out.y);
  memory.update(out.y - y, out.grad - g);
  return out;
}

int conjugate_gradient_minimize(const Objective& q, Vector& x, Vector& grad, double reference_norm, double rel_tol,
                                int max_iterations) {
  if (max_iterations < 0) max_iterations = 2 * static_cast<int>(x.size()) + 50;
  const double target = rel_tol * reference_norm;
  Vector r = -grad;
  double rr = r.squaredNorm();
  if (std::sqrt(rr) <= target) return 0;
  Vector p = r;
  int it = 0;
  for (; it < max_iterations && std::sqrt(rr) > target; ++it) {
    const Vector hp = q.hessian_vec(x, p);
    const double php = p.dot(hp);
    if (!(php > 0.0)) break;
    const double a = rr / php;
    x += a * p;
    r -= a * hp;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  grad = q.gradient(x);
  return it;
}

// --- multilevel solver -----------------------------------------------------------

MultilevelSolver::MultilevelSolver(const ObjectiveHierarchy& hierarchy, SolverConfig config, std::optional<Box> box)
    : h_(&hierarchy), cfg_(std::move(config)), box_(std::move(box)), lbfgs_(std::max(1, cfg_.lbfgs_pairs)) {
  cfg_.validate(hierarchy, box_.has_value());
  if (box_) {
    box_->validate();
    require_size(box_->lower, hierarchy.dim(LevelIndex(0)), "MultilevelSolver box");
  }
  last_alpha_.assign(std::size_t(cfg_.levels), 0.0);
  last_slope_.assign(std::size_t(cfg_.levels), 0.0);
  start_ = std::chrono::steady_clock::now();
}

double MultilevelSolver::elapsed() const {
  if (!cfg_.record_wall_time) return 0.0;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

double MultilevelSolver::criterion(const Vector& y, const Vector& g) const {
  return box_ ? box_->projected_gradient_norm(y, g) : g.norm();
}

void MultilevelSolver::record(std::size_t level, StepType type, double f, double crit, double alpha) {
  if (level > 0 && !cfg_.record_coarse_rows) return;
  TraceRow row;
  row.k = current_k_;
  row.level = static_cast<int>(level);
  row.step_type = type;
  row.f = f;
  row.grad_norm = crit;
  row.step_size = alpha;
  row.grad_evals = h_->counts(LevelIndex(level)).gradient - grad_base_[level];
  row.wall_s = elapsed();
  trace_.add(row);
}

SolverState MultilevelSolver::initial_state(const Vector& y0) {
  const Objective& f0 = h_->level_objective(LevelIndex(0));
  require_size(y0, f0.dim(), "initial point");
  if (box_ && !box_->contains(y0)) throw DomainError("initial point is outside the box");
  start_ = std::chrono::steady_clock::now();
  trace_ = ConvergenceTrace{};
  lbfgs_.reset();
  std::fill(last_alpha_.begin(), last_alpha_.end(), 0.0);
  std::fill(last_slope_.begin(), last_slope_.end(), 0.0);

  SolverState s;
  grad_base_.clear();
  for (std::size_t l = 0; l < h_->num_levels(); ++l) grad_base_.push_back(h_->counts(LevelIndex(l)).gradient);
  s.y = y0;
  s.f = f0.value(y0);
  s.grad = f0.gradient(y0);
  s.criterion = criterion(s.y, s.grad);
  current_k_ = 0;
  record(0, StepType::init, s.f, s.criterion, 0.0);
  return s;
}

bool MultilevelSolver::fine_iteration(std::size_t level, const Objective& obj, const Box* box, Iterate& it,
                                      double& alpha) {
  LineSearchConfig cfg = box ? cfg_.projected_search : cfg_.unconstrained_search;
  const double slope = it.g.squaredNorm();
  const bool use_lbfgs = level == 0 && cfg_.fine_method == FineMethod::lbfgs;
  if (cfg_.adaptive_initial_step && !use_lbfgs && last_alpha_[level] > 0.0 && slope > 0.0) {
    cfg.alpha0 = std::clamp(last_alpha_[level] * last_slope_[level] / slope, 1e-20, 1e20);
  }

  FineStepResult r;
  if (use_lbfgs) {
    r = fine_step_lbfgs(obj, lbfgs_, box, it.x, it.f, it.g, cfg_.unconstrained_search, cfg_.projected_search);
  } else if (box) {
    r = fine_step_pgd(obj, *box, it.x, it.f, it.g, cfg);
  } else {
    r = fine_step_gd(obj, it.x, it.f, it.g, cfg_.line_search, cfg);
  }
  last_fine_flag_ = r.stationary ? StepFlag::accepted : r.flag;
  if (!r.moved()) {
    last_alpha_[level] = 0.0;
    return false;
  }
  last_alpha_[level] = r.alpha;
  last_slope_[level] = slope;
  it.x = std::move(r.y);
  it.f = r.f;
  it.g = std::move(r.grad);
  alpha = r.alpha;
  return true;
}

bool MultilevelSolver::coarse_correction(std::size_t level, const Objective& obj, const Box* box, Iterate& it,
                                         double& alpha, bool& rejected) {
  rejected = false;
  const LevelIndex ell(level);
  const TransferPair& pair = h_->transfer(ell);
  if (!box && !coarse_condition_unconstrained(it.g, pair, cfg_.kappa, cfg_.epsilon)) return false;

  // grad psi(x_k) = R grad f(y_k) for both model kinds.
  const Vector anchor_grad = pair.restrict(it.g);
  std::optional<Box> cbox;
  if (box) {
    CoarseBox cb = coarse_box(pair, it.x, *box);
    cbox = cb.as_box();
    const BoxGate gate =
        coarse_condition_box(it.x, it.g, *box, pair.restrict(it.x), anchor_grad, *cbox, cfg_.kappa);
    if (!gate.use_coarse) return false;
  }

  std::unique_ptr<Objective> model;
  Vector anchor;
  if (cfg_.coarse_model == CoarseModelKind::algebraic) {
    auto m = std::make_unique<AlgebraicCoarseModel>(build_algebraic(obj, pair, it.x, it.g));
    anchor = m->anchor();
    model = std::move(m);
  } else {
    auto m = std::make_unique<GeometricCoarseModel>(
        build_geometric(h_->level_objective(ell.coarser()), pair, it.x, it.g));
    anchor = m->anchor();
    model = std::move(m);
  }

  const double psi_anchor = model->value(anchor);
  const Vector x_plus = solve_coarse_model(level + 1, *model, cbox ? &*cbox : nullptr, anchor, psi_anchor,
                                           anchor_grad);
  double psi_plus;
  try {
    psi_plus = model->value(x_plus);
  } catch (const DomainError&) {
    psi_plus = std::numeric_limits<double>::infinity();
  }
  if (!(psi_plus < psi_anchor)) {
    rejected = true;
    return false;
  }

  const Vector d = correction_direction(pair, x_plus, anchor);
  const double slope = it.g.dot(d);
  if (!(slope < 0.0)) {
    rejected = true;
    return false;
  }

  LineSearchConfig cfg = box ? cfg_.projected_search : cfg_.unconstrained_search;
  cfg.alpha0 = 1.0;
  StepResult res;
  if (box && cfg_.box_coarse_step == BoxCoarseStep::unit) {
    res.y_new = box->project(it.x + d);  // removes rounding-level violations only
    res.alpha = 1.0;
    res.f_new = obj.value(res.y_new);
    res.flag = StepFlag::accepted;
  } else if (box) {
    res = projected_armijo_arc(obj, *box, it.x, it.f, it.g, d, cfg);
  } else if (cfg_.line_search == LineSearchKind::wolfe) {
    res = wolfe(obj, it.x, it.f, it.g, d, cfg);
    if (!res.ok()) res = armijo_backtracking(obj, it.x, it.f, d, slope, cfg);
  } else {
    res = armijo_backtracking(obj, it.x, it.f, d, slope, cfg);
  }
  if (!res.ok()) {
    rejected = true;
    return false;
  }
  it.x = std::move(res.y_new);
  it.f = res.f_new;
  it.g = res.grad_new.size() == it.x.size() ? std::move(res.grad_new) : obj.gradient(it.x);
  alpha = res.alpha;
  return true;
}

Vector MultilevelSolver::solve_coarse_model(std::size_t level, const Objective& model, const Box* box,
                                            const Vector& anchor, double anchor_value, const Vector& anchor_grad) {
  if (hook_) return hook_(model, anchor, LevelIndex(level));
  Iterate c{anchor, anchor_value, anchor_grad};
  if (cfg_.coarse_solver == CoarseSolve::exact_quadratic && model.is_quadratic() && box == nullptr) {
    const double ref = anchor_grad.norm();
    if (level + 1 < static_cast<std::size_t>(cfg_.levels)) {
      run_level(level, model, nullptr, c, cfg_.exact_max_iters, cfg_.exact_tol_rel * ref);
    }
    conjugate_gradient_minimize(model, c.x, c.g, ref, 1e-10);
    return c.x;
  }
  run_level(level, model, box, c, cfg_.coarse_iters(level), 0.0);
  return c.x;
}

void MultilevelSolver::run_level(std::size_t level, const Objective& obj, const Box* box, Iterate& it,
                                 int iterations, double tol) {
  auto crit = [&] { return box ? box->projected_gradient_norm(it.x, it.g) : it.g.norm(); };
  for (int i = 0; i < iterations; ++i) {
    if (crit() <= tol) break;
    double alpha = 0.0;
    bool rejected = false;
    if (level + 1 < static_cast<std::size_t>(cfg_.levels) &&
        coarse_correction(level, obj, box, it, alpha, rejected)) {
      record(level, StepType::coarse, it.f, crit(), alpha);
      continue;
    }
    bool moved = false;
    for (int s = 0; s < cfg_.fine_steps(level); ++s) {
      if (!fine_iteration(level, obj, box, it, alpha)) break;
      moved = true;
      record(level, StepType::fine, it.f, crit(), alpha);
    }
    if (!moved) break;
  }
}

StepReport MultilevelSolver::step(SolverState& state) {
  const Objective& f0 = h_->level_objective(LevelIndex(0));
  const Box* box = box_ ? &*box_ : nullptr;
  current_k_ = state.k + 1;

  StepReport rep;
  rep.f_before = state.f;
  Iterate it{state.y, state.f, state.grad};
  double alpha = 0.0;
  bool took_coarse = false;
  if (cfg_.levels > 1) {
    took_coarse = coarse_correction(0, f0, box, it, alpha, rep.coarse_rejected);
    rep.coarse_attempted = took_coarse || rep.coarse_rejected;
  }
  bool moved = took_coarse;
  if (took_coarse) {
    rep.type = StepType::coarse;
    ++state.coarse_steps_taken;
    if (cfg_.fine_method == FineMethod::lbfgs) lbfgs_.update(it.x - state.y, it.g - state.grad);
  } else {
    rep.type = StepType::fine;
    moved = fine_iteration(0, f0, box, it, alpha);
    if (moved) ++state.fine_steps_taken;
  }
  if (rep.coarse_rejected) ++state.coarse_rejections;

  rep.alpha = moved ? alpha : 0.0;
  rep.f_after = it.f;
  const double change = std::abs(rep.f_before - rep.f_after);
  rep.progress = moved && change > 1e-15 * std::max(std::abs(rep.f_before), std::numeric_limits<double>::min());

  state.y = std::move(it.x);
  state.f = it.f;
  state.grad = std::move(it.g);
  state.criterion = criterion(state.y, state.grad);
  state.k += 1;
  state.last_step_type = rep.type;
  record(0, rep.type, state.f, state.criterion, rep.alpha);
  return rep;
}

SolveResult MultilevelSolver::solve(const Vector& y0) {
  SolveResult out;
  SolverState state = initial_state(y0);
  const double tol = cfg_.tol_abs > 0.0 ? cfg_.tol_abs : cfg_.tol_rel * state.criterion;
  for (int snap : cfg_.snapshot_iterations) {
    if (snap == 0) out.snapshots[0] = state.y;
  }

  out.status = SolverStatus::max_iterations;
  while (state.k < cfg_.max_outer) {
    if (state.criterion <= tol) {
      out.status = SolverStatus::converged;
      break;
    }
    const StepReport rep = step(state);
    for (int snap : cfg_.snapshot_iterations) {
      if (snap == state.k) out.snapshots[snap] = state.y;
    }
    if (!rep.progress) {
      const bool ls_failed = last_fine_flag_ == StepFlag::max_trials_exceeded ||
                             last_fine_flag_ == StepFlag::bracket_failure;
      out.status = ls_failed ? SolverStatus::line_search_failure : SolverStatus::stalled;
      if (state.criterion <= tol) out.status = SolverStatus::converged;
      break;
    }
  }
  if (out.status == SolverStatus::max_iterations && state.criterion <= tol) out.status = SolverStatus::converged;

  out.y = state.y;
  out.f = state.f;
  out.criterion = state.criterion;
  out.iterations = state.k;
  out.coarse_steps = state.coarse_steps_taken;
  out.fine_steps = state.fine_steps_taken;
  out.coarse_rejections = state.coarse_rejections;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  out.trace = trace_;
  return out;
}

SolveResult solve_multilevel(const Vector& y0, const ObjectiveHierarchy& hierarchy, const SolverConfig& config,
                             const std::optional<Box>& box) {
  MultilevelSolver solver(hierarchy, config, box);
  return solver.solve(y0);
}

}  // namespace mlopt
