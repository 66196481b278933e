#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mlopt/solver.hpp"
#include "mlopt/tomography.hpp"
#include "mlopt_bench/config.hpp"

namespace mlopt::bench {

enum ExitCode : int { kExitOk = 0, kExitNotConverged = 1, kExitConfig = 2, kExitIo = 3 };

/// Problem built from a config: hierarchy, start point and, for tomography,
/// the projectors and ground truth.
struct ProblemInstance {
  ObjectiveHierarchy hierarchy;
  std::optional<Box> box;
  Vector y0;
  Grid2D grid{2};
  std::optional<Vector> truth;
  std::vector<Projector> projectors;
};

ProblemInstance build_problem(const ExperimentConfig& config);

struct RunOutcome {
  std::string solver;
  bool ok = false;
  std::string error;
  SolveResult result;
  /// Evaluation counts per level at the end of the run.
  std::vector<EvalCounts> counts;
};

/// Builds a fresh problem instance and runs one solver variant on it.
/// Solver failures are captured in the outcome; config errors propagate.
RunOutcome run_solver(const ExperimentConfig& config, const std::string& solver_name);

/// Exit code for a finished run (0 or kExitNotConverged).
int outcome_code(const ExperimentConfig& config, const RunOutcome& outcome);

/// Writes trace.csv, summary.json and (when enabled) final / snapshot images
/// into `dir`. Throws IoError.
void write_run(const std::filesystem::path& dir, const ExperimentConfig& config, const RunOutcome& outcome);

/// rel_k = (f_k - f_best) / (f_0 - f_best) per solver on the finest level,
/// f_best the lowest value reached by any run.
void write_rel_table(const std::filesystem::path& path, const std::vector<RunOutcome>& outcomes);

struct LipschitzRow {
  int level = 0;
  int side = 0;
  Index n = 0;
  Index m = 0;
  LipschitzEstimate estimate;
};

std::vector<LipschitzRow> lipschitz_table(const ExperimentConfig& config);
void write_lipschitz_csv(const std::filesystem::path& path, const std::vector<LipschitzRow>& rows);

int cmd_solve(const ExperimentConfig& config, const std::filesystem::path& out_dir);
int cmd_compare(const ExperimentConfig& config, const std::filesystem::path& out_dir);
int cmd_lipschitz(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace mlopt::bench
