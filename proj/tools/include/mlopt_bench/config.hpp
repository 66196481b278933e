#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlopt/solver.hpp"
#include "mlopt/tomography.hpp"

namespace mlopt::bench {

/// Malformed or out-of-range configuration; `key()` names the offending
/// "section.key" (empty when the problem is not tied to a key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ProblemKind { huber_tv, kl_box, quadratic_test };
std::string_view to_string(ProblemKind kind);

/// Solver variants known to the harness.
///   multilevel_geometric / multilevel_algebraic : recursive scheme
///   gd   : single-level gradient descent (projected on box problems)
///   pgd  : single-level projected gradient descent (box problems only)
///   lbfgs: single-level L-BFGS (projected search on box problems)
bool is_known_solver(std::string_view name);

struct ProblemSection {
  friend bool operator==(const ProblemSection&, const ProblemSection&) = default;

  ProblemKind kind = ProblemKind::huber_tv;
  int side = 64;
  int levels = 3;
  double undersampling = 0.1;
  PhantomKind phantom = PhantomKind::disks;
  std::uint64_t seed = 1;
  double lambda = 0.1;
  double rho = 0.01;
  double beta_dom = 1e-6;
  double kl_background = 0.05;
};

struct SolverSection {
  friend bool operator==(const SolverSection&, const SolverSection&) = default;

  std::string name = "multilevel_geometric";
  double kappa = 0.47;
  double epsilon = 1e-3;
  int max_outer = 200;
  /// "auto" picks gradient_descent / projected_gd by problem; "lbfgs" uses
  /// L-BFGS for the finest-level fine steps of multilevel runs.
  std::string fine_method = "auto";
  int lbfgs_pairs = 3;
  std::vector<int> coarse_iters;
  std::vector<int> fine_steps;
  CoarseSolve coarse_solver = CoarseSolve::gradient_iterations;
  LineSearchKind line_search = LineSearchKind::wolfe;
  BoxCoarseStep box_coarse_step = BoxCoarseStep::projected_arc;
  double rho1 = 1e-4;
  double c2 = 0.9;
  double beta = 0.5;
  double alpha0 = 1.0;
  int max_trials = 50;
  double proj_beta = 0.8;
  int proj_max_trials = 60;
  bool adaptive_initial_step = true;
  double tol_rel = 1e-6;
  double tol_abs = 0.0;
  double exact_tol_rel = 1e-11;
  int exact_max_iters = 200;
  bool require_convergence = false;
  std::vector<int> snapshots;
};

struct CompareSection {
  friend bool operator==(const CompareSection&, const CompareSection&) = default;

  std::vector<std::string> solvers{"multilevel_geometric", "gd", "lbfgs"};
  bool parallel = true;
};

struct OutputSection {
  friend bool operator==(const OutputSection&, const OutputSection&) = default;

  bool record_wall_time = true;
  bool write_images = true;
  int trace_format_version = ConvergenceTrace::kFormatVersion;
};

struct ExperimentConfig {
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  ProblemSection problem;
  SolverSection solver;
  CompareSection compare;
  OutputSection output;

  /// Range checks; throws ConfigError naming the key.
  void validate() const;
  /// SolverConfig for the named solver variant on this problem.
  [[nodiscard]] SolverConfig solver_config(const std::string& solver_name) const;
};

/// INI text with sections [problem], [solver], [compare], [output]. Unknown
/// sections or keys and unparsable values raise ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Writes every key; parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const ExperimentConfig& config);


}  // namespace mlopt::bench
