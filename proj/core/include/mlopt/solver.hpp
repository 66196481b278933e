#pragma once

#include <chrono>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "mlopt/coarse_model.hpp"
#include "mlopt/lbfgs.hpp"
#include "mlopt/line_search.hpp"
#include "mlopt/objective.hpp"

namespace mlopt {

enum class FineMethod { gradient_descent, projected_gd, lbfgs };
enum class CoarseSolve { exact_quadratic, gradient_iterations };
enum class CoarseModelKind { geometric, algebraic };
enum class LineSearchKind { wolfe, armijo };
/// How the step length of a box-constrained coarse correction is chosen:
/// `unit` takes alpha = 1 unconditionally (feasible by construction of the
/// coarse box), `projected_arc` starts at alpha = 1 and backtracks.
enum class BoxCoarseStep { projected_arc, unit };
enum class StepType { init, coarse, fine };
enum class SolverStatus { converged, max_iterations, stalled, line_search_failure };

std::string_view to_string(FineMethod m);
std::string_view to_string(CoarseSolve s);
std::string_view to_string(CoarseModelKind k);
std::string_view to_string(LineSearchKind k);
std::string_view to_string(BoxCoarseStep s);
std::string_view to_string(StepType t);
std::string_view to_string(SolverStatus s);

struct SolverConfig {
  double kappa = 0.47;
  double epsilon = 1e-3;
  /// Number of hierarchy levels used; 1 runs the plain fine method.
  int levels = 2;
  /// Outer iterations per coarse visit, indexed by level (entry 0 unused).
  /// Missing entries default to 1.
  std::vector<int> coarse_iters_per_level;
  /// Fine iterations per outer iteration at each coarse level. Missing
  /// entries default to 2^level. Level 0 always does one.
  std::vector<int> fine_steps_per_level;
  int max_outer = 200;
  FineMethod fine_method = FineMethod::gradient_descent;
  int lbfgs_pairs = 3;
  CoarseSolve coarse_solver = CoarseSolve::gradient_iterations;
  CoarseModelKind coarse_model = CoarseModelKind::geometric;
  LineSearchKind line_search = LineSearchKind::wolfe;
  BoxCoarseStep box_coarse_step = BoxCoarseStep::projected_arc;
  LineSearchConfig unconstrained_search{1e-4, 0.9, 0.5, 1.0, 50};
  LineSearchConfig projected_search{1e-4, 0.9, 0.8, 1.0, 60};
  /// Scale each fine step's first trial by the previous step's success
  /// (alpha_prev * |g_prev.d_prev| / |g.d|). Off means alpha0 every time.
  bool adaptive_initial_step = true;
  /// Stop when the criterion (||grad f||, or the projected-gradient residual
  /// when constrained) drops below tol_abs, or tol_rel times its initial value
  /// when tol_abs is zero.
  double tol_rel = 1e-6;
  double tol_abs = 0.0;
  /// Exact coarse solves: recursive iterations stop at this relative gradient
  /// reduction before the conjugate-gradient polish.
  double exact_tol_rel = 1e-11;
  int exact_max_iters = 200;
  bool record_wall_time = true;
  /// Record the steps taken inside coarse visits (levels >= 1) in the trace.
  bool record_coarse_rows = true;
  /// Level-0 iterations at which to keep a copy of the iterate.
  std::vector<int> snapshot_iterations;

  [[nodiscard]] int coarse_iters(std::size_t level) const;
  [[nodiscard]] int fine_steps(std::size_t level) const;
  /// Throws std::invalid_argument on out-of-range parameters, including
  /// kappa outside (0, min(1, ||P||)) for any transfer pair in use.
  void validate(const ObjectiveHierarchy& h, bool constrained) const;
};

struct TraceRow {
  int k = 0;
  int level = 0;
  StepType step_type = StepType::init;
  double f = 0.0;
  double grad_norm = 0.0;
  double step_size = 0.0;
  std::uint64_t grad_evals = 0;
  double wall_s = 0.0;
};

/// Per-step record. Level-0 rows carry the fine objective; rows at deeper
/// levels carry the coarse model value at that level. `grad_norm` is the
/// stopping criterion (projected-gradient residual when constrained) and
/// `grad_evals` the gradient evaluations at the row's level since the start
/// of the run.
class ConvergenceTrace {
 public:
  static constexpr int kFormatVersion = 1;
  static constexpr std::string_view kHeader = "k,level,step_type,f,grad_norm,step_size,grad_evals,wall_s";

  void add(const TraceRow& row) { rows_.push_back(row); }
  [[nodiscard]] const std::vector<TraceRow>& rows() const { return rows_; }
  [[nodiscard]] std::vector<TraceRow> level_rows(int level) const;
  [[nodiscard]] int count(int level, StepType type) const;
  void write_csv(std::ostream& out) const;

 private:
  std::vector<TraceRow> rows_;
};

struct SolverState {
  Vector y;
  double f = 0.0;
  Vector grad;
  /// ||grad f|| unconstrained, projected-gradient residual a_k when constrained.
  double criterion = 0.0;
  int k = 0;
  int coarse_steps_taken = 0;
  int fine_steps_taken = 0;
  int coarse_rejections = 0;
  StepType last_step_type = StepType::init;
};

struct StepReport {
  StepType type = StepType::fine;
  double alpha = 0.0;
  double f_before = 0.0;
  double f_after = 0.0;
  bool coarse_attempted = false;
  bool coarse_rejected = false;
  bool progress = false;
};

struct SolveResult {
  Vector y;
  double f = 0.0;
  double criterion = 0.0;
  SolverStatus status = SolverStatus::max_iterations;
  int iterations = 0;
  int coarse_steps = 0;
  int fine_steps = 0;
  int coarse_rejections = 0;
  double wall_seconds = 0.0;
  ConvergenceTrace trace;
  std::map<int, Vector> snapshots;
};

/// True iff ||P^T g|| >= kappa ||g|| and ||P^T g|| > epsilon.
bool coarse_condition_unconstrained(const Vector& grad_f, const TransferPair& pair, double kappa,
                                    double epsilon);

struct BoxGate {
  double a = 0.0;  ///< ||Pi_f[y - grad f(y)] - y||
  double b = 0.0;  ///< ||Pi_psi[x_k - grad psi(x_k)] - x_k||
  bool use_coarse = false;
};

/// Constrained gate b_k >= kappa a_k.
BoxGate coarse_condition_box(const Vector& y_k, const Vector& grad_f, const Box& fine_box, const Vector& x_k,
                             const Vector& coarse_grad, const Box& coarse_box, double kappa);

struct FineStepResult {
  Vector y;
  double f = 0.0;
  Vector grad;
  double alpha = 0.0;
  StepFlag flag = StepFlag::no_progress;
  bool stationary = false;

  [[nodiscard]] bool moved() const { return flag == StepFlag::accepted; }
};

/// One gradient-descent iteration d = -g with Wolfe or Armijo step.
FineStepResult fine_step_gd(const Objective& f, const Vector& y, double f_y, const Vector& g,
                            LineSearchKind search, const LineSearchConfig& cfg);
/// One projected-gradient iteration along the projection arc of d = -g.
FineStepResult fine_step_pgd(const Objective& f, const Box& box, const Vector& y, double f_y, const Vector& g,
                             const LineSearchConfig& cfg);
/// One L-BFGS iteration; updates `memory` with the accepted step. With a box
/// the direction is searched along the projection arc (falling back to -g).
FineStepResult fine_step_lbfgs(const Objective& f, LbfgsMemory& memory, const Box* box, const Vector& y,
                               double f_y, const Vector& g, const LineSearchConfig& wolfe_cfg,
                               const LineSearchConfig& arc_cfg);

/// Minimizes a quadratic objective from x by conjugate gradients until the
/// gradient norm is below rel_tol * reference_norm. Returns the iteration count.
int conjugate_gradient_minimize(const Objective& q, Vector& x, Vector& grad, double reference_norm,
                                double rel_tol = 1e-10, int max_iterations = -1);

/// Two-level scheme applied recursively over the levels of a hierarchy.
///
/// Each outer iteration at level 0 either takes a coarse correction (when the
/// gate holds and the coarse model is decreased) or one fine iteration. A
/// coarse visit at level l runs coarse_iters(l) outer iterations of the same
/// scheme on the coarse model, each either recursing further or taking
/// fine_steps(l) fine iterations.
class MultilevelSolver {
 public:
  /// Replacement for the built-in coarse-model minimizer; receives the model,
  /// its anchor x_k and the coarse level, and returns x_k^+.
  using CoarseSolverHook = std::function<Vector(const Objective& model, const Vector& anchor, LevelIndex level)>;

  MultilevelSolver(const ObjectiveHierarchy& hierarchy, SolverConfig config, std::optional<Box> box = {});

  void set_coarse_solver(CoarseSolverHook hook) { hook_ = std::move(hook); }

  /// Evaluates f and its gradient at y0 and starts a fresh trace.
  SolverState initial_state(const Vector& y0);
  /// One outer iteration at the finest level.
  StepReport step(SolverState& state);
  SolveResult solve(const Vector& y0);

  [[nodiscard]] const ConvergenceTrace& trace() const { return trace_; }
  [[nodiscard]] const SolverConfig& config() const { return cfg_; }
  /// Stopping criterion at the finest level.
  [[nodiscard]] double criterion(const Vector& y, const Vector& g) const;

 private:
  struct Iterate {
    Vector x;
    double f = 0.0;
    Vector g;
  };

  bool coarse_correction(std::size_t level, const Objective& obj, const Box* box, Iterate& it, double& alpha,
                         bool& rejected);
  bool fine_iteration(std::size_t level, const Objective& obj, const Box* box, Iterate& it, double& alpha);
  StepFlag last_fine_flag_ = StepFlag::accepted;
  Vector solve_coarse_model(std::size_t level, const Objective& model, const Box* box, const Vector& anchor,
                            double anchor_value, const Vector& anchor_grad);
  void run_level(std::size_t level, const Objective& obj, const Box* box, Iterate& it, int iterations,
                 double tol);
  void record(std::size_t level, StepType type, double f, double crit, double alpha);
  double elapsed() const;

  const ObjectiveHierarchy* h_;
  SolverConfig cfg_;
  std::optional<Box> box_;
  CoarseSolverHook hook_;
  ConvergenceTrace trace_;
  LbfgsMemory lbfgs_;
  std::vector<double> last_alpha_;
  std::vector<double> last_slope_;
  // Hierarchy counters at initial_state(), so traces count from zero.
  std::vector<std::uint64_t> grad_base_;
  int current_k_ = 0;
  std::chrono::steady_clock::time_point start_;
};

/// Convenience wrapper: constructs a MultilevelSolver and runs it from y0.
SolveResult solve_multilevel(const Vector& y0, const ObjectiveHierarchy& hierarchy, const SolverConfig& config,
                             const std::optional<Box>& box = std::nullopt);

}  // namespace mlopt
