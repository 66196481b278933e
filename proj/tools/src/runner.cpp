#include "mlopt_bench/runner.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mlopt/io.hpp"
#include "mlopt/quadratic_problem.hpp"

namespace mlopt::bench {

namespace {

TomographySetup tomography_setup(const ExperimentConfig& c) {
  TomographySetup s;
  s.side = c.problem.side;
  s.levels = c.problem.levels;
  s.undersampling = c.problem.undersampling;
  s.phantom = c.problem.phantom;
  s.seed = c.problem.seed;
  s.huber = HuberParams{c.problem.lambda, c.problem.rho};
  s.kl = KLParams{c.problem.beta_dom};
  s.kl_background = c.problem.kl_background;
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

nlohmann::json counts_json(const std::vector<EvalCounts>& counts) {
  nlohmann::json value = nlohmann::json::array();
  nlohmann::json grad = nlohmann::json::array();
  nlohmann::json hess = nlohmann::json::array();
  for (const auto& c : counts) {
    value.push_back(c.value);
    grad.push_back(c.gradient);
    hess.push_back(c.hessian_vec);
  }
  return {{"value", value}, {"gradient", grad}, {"hessian_vec", hess}};
}

void write_image_pair(const std::filesystem::path& dir, const std::string& stem, Grid2D grid, const Vector& img) {
  write_vector_csv(dir / (stem + ".csv"), img);
  if (img.size() == grid.size()) write_pgm(dir / (stem + ".pgm"), grid, img, 0.0, 0.0);
}

}  // namespace

ProblemInstance build_problem(const ExperimentConfig& config) {
  config.validate();
  switch (config.problem.kind) {
    case ProblemKind::quadratic_test: {
      QuadraticProblem q = build_quadratic_problem({config.problem.side, config.problem.levels, config.problem.seed});
      return ProblemInstance{std::move(q.hierarchy), std::nullopt, std::move(q.y0), Grid2D(config.problem.side),
                             std::nullopt, {}};
    }
    case ProblemKind::huber_tv:
    case ProblemKind::kl_box: {
      const TomographySetup setup = tomography_setup(config);
      TomographyProblem t = config.problem.kind == ProblemKind::huber_tv ? build_huber_tv_problem(setup)
                                                                           : build_kl_problem(setup);
      Vector truth = t.phantoms.front();
      return ProblemInstance{std::move(t.hierarchy), std::move(t.box), std::move(t.y0),
                             Grid2D(config.problem.side), std::move(truth), std::move(t.projectors)};
    }
  }
  throw ConfigError("problem.kind", "unsupported problem");
}

RunOutcome run_solver(const ExperimentConfig& config, const std::string& solver_name) {
  const SolverConfig solver_cfg = config.solver_config(solver_name);
  ProblemInstance inst = build_problem(config);
  if (solver_cfg.levels > static_cast<int>(inst.hierarchy.num_levels())) {
    throw ConfigError("problem.levels", "hierarchy has fewer levels than requested");
  }
  try {
    solver_cfg.validate(inst.hierarchy, inst.box.has_value());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("solver", e.what());
  }

  RunOutcome out;
  out.solver = solver_name;
  try {
    out.result = solve_multilevel(inst.y0, inst.hierarchy, solver_cfg, inst.box);
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  for (std::size_t l = 0; l < inst.hierarchy.num_levels(); ++l) out.counts.push_back(inst.hierarchy.counts(LevelIndex(l)));
  if (!config.output.record_wall_time) out.result.wall_seconds = 0.0;
  return out;
}

int outcome_code(const ExperimentConfig& config, const RunOutcome& outcome) {
  if (!outcome.ok) return kExitNotConverged;
  switch (outcome.result.status) {
    case SolverStatus::converged: return kExitOk;
    case SolverStatus::max_iterations: return config.solver.require_convergence ? kExitNotConverged : kExitOk;
    case SolverStatus::stalled:
    case SolverStatus::line_search_failure: return kExitNotConverged;
  }
  return kExitNotConverged;
}

void write_run(const std::filesystem::path& dir, const ExperimentConfig& config, const RunOutcome& outcome) {
  ensure_dir(dir);
  {
    auto out = open_out(dir / "trace.csv");
    outcome.result.trace.write_csv(out);
    if (!out) throw IoError("failed writing trace in '" + dir.string() + "'");
  }

  const auto& r = outcome.result;
  const auto& rows = r.trace.rows();
  nlohmann::json summary{
      {"trace_format_version", ConvergenceTrace::kFormatVersion},
      {"problem", std::string(to_string(config.problem.kind))},
      {"solver", outcome.solver},
      {"side", config.problem.side},
      {"levels", config.problem.levels},
      {"seed", config.problem.seed},
      {"ok", outcome.ok},
      {"error", outcome.error},
      {"status", std::string(to_string(r.status))},
      {"exit_code", outcome_code(config, outcome)},
      {"f0", rows.empty() ? 0.0 : rows.front().f},
      {"f_final", r.f},
      {"criterion_final", r.criterion},
      {"iterations", r.iterations},
      {"coarse_steps", r.coarse_steps},
      {"fine_steps", r.fine_steps},
      {"coarse_rejections", r.coarse_rejections},
      {"wall_seconds", r.wall_seconds},
      {"evaluations", counts_json(outcome.counts)},
  };
  {
    auto out = open_out(dir / "summary.json");
    out << std::setprecision(17) << summary.dump(2) << '\n';
    if (!out) throw IoError("failed writing summary in '" + dir.string() + "'");
  }

  if (config.output.write_images && outcome.ok) {
    const Grid2D grid(config.problem.side);
    write_image_pair(dir, "final", grid, r.y);
    for (const auto& [k, img] : r.snapshots) write_image_pair(dir, "snapshot_k" + std::to_string(k), grid, img);
  }
}

void write_rel_table(const std::filesystem::path& path, const std::vector<RunOutcome>& outcomes) {
  double f_best = std::numeric_limits<double>::infinity();
  int k_max = -1;
  std::vector<std::vector<TraceRow>> fine(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    fine[i] = outcomes[i].result.trace.level_rows(0);
    for (const auto& row : fine[i]) {
      f_best = std::min(f_best, row.f);
      k_max = std::max(k_max, row.k);
    }
  }
  auto out = open_out(path);
  out << 'k';
  for (const auto& o : outcomes) out << ',' << o.solver;
  out << '\n';
  out.precision(17);
  for (int k = 0; k <= k_max; ++k) {
    out << k;
    for (const auto& rows : fine) {
      out << ',';
      if (rows.empty()) continue;
      const double f0 = rows.front().f;
      const auto it = std::find_if(rows.begin(), rows.end(), [&](const TraceRow& r) { return r.k == k; });
      if (it != rows.end()) out << (f0 > f_best ? (it->f - f_best) / (f0 - f_best) : 0.0);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<LipschitzRow> lipschitz_table(const ExperimentConfig& config) {
  if (config.problem.kind == ProblemKind::quadratic_test) {
    throw ConfigError("problem.kind", "lipschitz needs a tomography problem (huber_tv or kl_box)");
  }
  config.validate();
  const HuberParams params{config.problem.lambda, config.problem.rho};
  Grid2D grid(config.problem.side);
  const int n_angles = angles_for_undersampling(grid, config.problem.undersampling);
  std::vector<LipschitzRow> rows;
  for (int l = 0; l < config.problem.levels; ++l) {
    if (l > 0) grid = grid.coarser();
    const Projector p = build_projector(grid, n_angles);
    rows.push_back({l, grid.side, grid.size(), p.a.rows(), lipschitz_estimate(p, params)});
  }
  return rows;
}

void write_lipschitz_csv(const std::filesystem::path& path, const std::vector<LipschitzRow>& rows) {
  auto out = open_out(path);
  out << "level,side,n,m,norm_A,norm_At,L_psi,omega,L_phi_bound,converged\n";
  out.precision(17);
  for (const auto& r : rows) {
    const auto& e = r.estimate;
    out << r.level << ',' << r.side << ',' << r.n << ',' << r.m << ',' << e.norm_a << ',' << e.norm_at << ','
        << e.l_psi << ',' << e.omega << ',' << e.l_phi_bound << ',' << (e.converged ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

int cmd_solve(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const RunOutcome outcome = run_solver(config, config.solver.name);
  write_run(out_dir, config, outcome);
  if (config.output.write_images) {
    const ProblemInstance inst = build_problem(config);
    if (inst.truth) write_image_pair(out_dir, "phantom", inst.grid, *inst.truth);
  }
  return outcome_code(config, outcome);
}

int cmd_compare(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  const auto& names = config.compare.solvers;
  // Validate every variant up front so config errors are not hidden in threads.
  for (const auto& n : names) (void)config.solver_config(n);

  std::vector<RunOutcome> outcomes(names.size());
  std::vector<std::exception_ptr> errors(names.size());
  auto run = [&](std::size_t i) {
    try {
      outcomes[i] = run_solver(config, names[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (config.compare.parallel) {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < names.size(); ++i) workers.emplace_back(run, i);
  } else {
    for (std::size_t i = 0; i < names.size(); ++i) run(i);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  int worst = kExitOk;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& o : outcomes) {
    write_run(out_dir / o.solver, config, o);
    const int code = outcome_code(config, o);
    worst = std::max(worst, code);
    runs.push_back({{"solver", o.solver},
                    {"ok", o.ok},
                    {"status", std::string(to_string(o.result.status))},
                    {"f_final", o.result.f},
                    {"exit_code", code}});
  }
  write_rel_table(out_dir / "rel_table.csv", outcomes);
  auto out = open_out(out_dir / "summary.json");
  out << nlohmann::json{{"trace_format_version", ConvergenceTrace::kFormatVersion},
                        {"problem", std::string(to_string(config.problem.kind))},
                        {"runs", runs},
                        {"exit_code", worst}}
             .dump(2)
      << '\n';
  if (!out) throw IoError("failed writing compare summary");
  if (config.output.write_images) {
    const ProblemInstance inst = build_problem(config);
    if (inst.truth) write_image_pair(out_dir, "phantom", inst.grid, *inst.truth);
  }
  return worst;
}

int cmd_lipschitz(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  write_lipschitz_csv(out_dir / "lipschitz.csv", lipschitz_table(config));
  return kExitOk;
}

}  // namespace mlopt::bench
