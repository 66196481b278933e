#include "mlopt_bench/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace mlopt::bench {

namespace {

constexpr std::array kSolvers{"multilevel_geometric", "multilevel_algebraic", "gd", "pgd", "lbfgs"};

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key, "expected a number, got '" + text + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError(key, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key, "expected true/false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) out.push_back(parse_int<int>(key, item));
  return out;
}

std::string fmt(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

template <typename T>
std::string join(const std::vector<T>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "," : "") << items[i];
  return out.str();
}

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& key, const std::string& text, const std::array<Enum, N>& values) {
  for (Enum e : values) {
    if (to_string(e) == text) return e;
  }
  std::string allowed;
  for (Enum e : values) allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(e));
  throw ConfigError(key, "unknown value '" + text + "' (allowed: " + allowed + ")");
}

constexpr std::array kProblemKinds{ProblemKind::huber_tv, ProblemKind::kl_box, ProblemKind::quadratic_test};
constexpr std::array kPhantoms{PhantomKind::disks, PhantomKind::bone_like};
constexpr std::array kCoarseSolves{CoarseSolve::gradient_iterations, CoarseSolve::exact_quadratic};
constexpr std::array kLineSearches{LineSearchKind::wolfe, LineSearchKind::armijo};
constexpr std::array kBoxSteps{BoxCoarseStep::projected_arc, BoxCoarseStep::unit};

struct Field {
  const char* section;
  const char* key;
  std::function<void(ExperimentConfig&, const std::string& full_key, const std::string& value)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define MLOPT_DOUBLE(sec, member)                                                                        \
  Field{#sec, #member, [](ExperimentConfig& c, const std::string& k, const std::string& v) {             \
          c.sec.member = parse_double(k, v);                                                             \
        },                                                                                               \
        [](const ExperimentConfig& c) { return fmt(c.sec.member); }}
#define MLOPT_INT(sec, member)                                                                           \
  Field{#sec, #member, [](ExperimentConfig& c, const std::string& k, const std::string& v) {             \
          c.sec.member = parse_int<decltype(c.sec.member)>(k, v);                                        \
        },                                                                                               \
        [](const ExperimentConfig& c) { return std::to_string(c.sec.member); }}
#define MLOPT_BOOL(sec, member)                                                                          \
  Field{#sec, #member, [](ExperimentConfig& c, const std::string& k, const std::string& v) {             \
          c.sec.member = parse_bool(k, v);                                                               \
        },                                                                                               \
        [](const ExperimentConfig& c) { return fmt(c.sec.member); }}
#define MLOPT_INT_LIST(sec, member, name)                                                                \
  Field{#sec, name, [](ExperimentConfig& c, const std::string& k, const std::string& v) {                \
          c.sec.member = parse_int_list(k, v);                                                           \
        },                                                                                               \
        [](const ExperimentConfig& c) { return join(c.sec.member); }}
#define MLOPT_ENUM(sec, member, values)                                                                  \
  Field{#sec, #member, [](ExperimentConfig& c, const std::string& k, const std::string& v) {             \
          c.sec.member = parse_enum(k, v, values);                                                       \
        },                                                                                               \
        [](const ExperimentConfig& c) { return std::string(to_string(c.sec.member)); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      Field{"problem", "kind",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.problem.kind = parse_enum(k, v, kProblemKinds);
            },
            [](const ExperimentConfig& c) { return std::string(to_string(c.problem.kind)); }},
      MLOPT_INT(problem, side),
      MLOPT_INT(problem, levels),
      MLOPT_DOUBLE(problem, undersampling),
      MLOPT_ENUM(problem, phantom, kPhantoms),
      MLOPT_INT(problem, seed),
      MLOPT_DOUBLE(problem, lambda),
      MLOPT_DOUBLE(problem, rho),
      MLOPT_DOUBLE(problem, beta_dom),
      MLOPT_DOUBLE(problem, kl_background),

      Field{"solver", "name",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              if (!is_known_solver(v)) throw ConfigError(k, "unknown solver '" + v + "'");
              c.solver.name = v;
            },
            [](const ExperimentConfig& c) { return c.solver.name; }},
      MLOPT_DOUBLE(solver, kappa),
      MLOPT_DOUBLE(solver, epsilon),
      MLOPT_INT(solver, max_outer),
      Field{"solver", "fine_method",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              if (v != "auto" && v != "lbfgs") throw ConfigError(k, "expected auto or lbfgs, got '" + v + "'");
              c.solver.fine_method = v;
            },
            [](const ExperimentConfig& c) { return c.solver.fine_method; }},
      MLOPT_INT(solver, lbfgs_pairs),
      MLOPT_INT_LIST(solver, coarse_iters, "coarse_iters"),
      MLOPT_INT_LIST(solver, fine_steps, "fine_steps"),
      MLOPT_ENUM(solver, coarse_solver, kCoarseSolves),
      MLOPT_ENUM(solver, line_search, kLineSearches),
      MLOPT_ENUM(solver, box_coarse_step, kBoxSteps),
      MLOPT_DOUBLE(solver, rho1),
      MLOPT_DOUBLE(solver, c2),
      MLOPT_DOUBLE(solver, beta),
      MLOPT_DOUBLE(solver, alpha0),
      MLOPT_INT(solver, max_trials),
      MLOPT_DOUBLE(solver, proj_beta),
      MLOPT_INT(solver, proj_max_trials),
      MLOPT_BOOL(solver, adaptive_initial_step),
      MLOPT_DOUBLE(solver, tol_rel),
      MLOPT_DOUBLE(solver, tol_abs),
      MLOPT_DOUBLE(solver, exact_tol_rel),
      MLOPT_INT(solver, exact_max_iters),
      MLOPT_BOOL(solver, require_convergence),
      MLOPT_INT_LIST(solver, snapshots, "snapshots"),

      Field{"compare", "solvers",
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {
              auto names = split_list(v);
              if (names.empty()) throw ConfigError(k, "need at least one solver");
              for (const auto& n : names) {
                if (!is_known_solver(n)) throw ConfigError(k, "unknown solver '" + n + "'");
              }
              c.compare.solvers = std::move(names);
            },
            [](const ExperimentConfig& c) { return join(c.compare.solvers); }},
      MLOPT_BOOL(compare, parallel),

      MLOPT_BOOL(output, record_wall_time),
      MLOPT_BOOL(output, write_images),
      MLOPT_INT(output, trace_format_version),
  };
  return table;
}

#undef MLOPT_DOUBLE
#undef MLOPT_INT
#undef MLOPT_BOOL
#undef MLOPT_INT_LIST
#undef MLOPT_ENUM

void require(bool ok, const char* key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::huber_tv: return "huber_tv";
    case ProblemKind::kl_box: return "kl_box";
    case ProblemKind::quadratic_test: return "quadratic_test";
  }
  return "unknown";
}

bool is_known_solver(std::string_view name) {
  return std::find(kSolvers.begin(), kSolvers.end(), name) != kSolvers.end();
}

void ExperimentConfig::validate() const {
  const auto& p = problem;
  require(p.side >= 2, "problem.side", "must be >= 2");
  require(p.levels >= 1, "problem.levels", "must be >= 1");
  require(p.levels == 1 || (p.side % (1 << (p.levels - 1)) == 0 && (p.side >> (p.levels - 1)) >= 2),
          "problem.levels", "side must stay even and >= 2 on every coarser level");
  require(p.undersampling > 0.0 && p.undersampling <= 1.0, "problem.undersampling", "must be in (0, 1]");
  require(p.lambda >= 0.0, "problem.lambda", "must be >= 0");
  require(p.rho > 0.0, "problem.rho", "must be > 0");
  require(p.beta_dom > 0.0, "problem.beta_dom", "must be > 0");
  require(p.kl_background > 0.0, "problem.kl_background", "must be > 0");

  const auto& s = solver;
  require(s.kappa > 0.0 && s.kappa < 1.0, "solver.kappa", "must be in (0, 1)");
  require(s.epsilon > 0.0 && s.epsilon < 1.0, "solver.epsilon", "must be in (0, 1)");
  require(s.max_outer >= 0, "solver.max_outer", "must be >= 0");
  require(s.lbfgs_pairs >= 1, "solver.lbfgs_pairs", "must be >= 1");
  for (int v : s.coarse_iters) require(v >= 1, "solver.coarse_iters", "entries must be >= 1");
  for (int v : s.fine_steps) require(v >= 1, "solver.fine_steps", "entries must be >= 1");
  require(s.rho1 > 0.0 && s.rho1 < 0.5, "solver.rho1", "must be in (0, 0.5)");
  require(s.c2 > s.rho1 && s.c2 < 1.0, "solver.c2", "must be in (rho1, 1)");
  require(s.beta > 0.0 && s.beta < 1.0, "solver.beta", "must be in (0, 1)");
  require(s.alpha0 > 0.0, "solver.alpha0", "must be > 0");
  require(s.max_trials >= 1, "solver.max_trials", "must be >= 1");
  require(s.proj_beta > 0.0 && s.proj_beta < 1.0, "solver.proj_beta", "must be in (0, 1)");
  require(s.proj_max_trials >= 1, "solver.proj_max_trials", "must be >= 1");
  require(s.tol_rel >= 0.0, "solver.tol_rel", "must be >= 0");
  require(s.tol_abs >= 0.0, "solver.tol_abs", "must be >= 0");
  require(s.exact_tol_rel >= 0.0, "solver.exact_tol_rel", "must be >= 0");
  require(s.exact_max_iters >= 0, "solver.exact_max_iters", "must be >= 0");
  for (int v : s.snapshots) require(v >= 0, "solver.snapshots", "entries must be >= 0");
  require(p.kind == ProblemKind::kl_box || s.name != "pgd", "solver.name", "pgd needs a box-constrained problem");
  for (const auto& n : compare.solvers) {
    require(p.kind == ProblemKind::kl_box || n != "pgd", "compare.solvers", "pgd needs a box-constrained problem");
  }
  require(output.trace_format_version == ConvergenceTrace::kFormatVersion, "output.trace_format_version",
          "unsupported version " + std::to_string(output.trace_format_version));
}

SolverConfig ExperimentConfig::solver_config(const std::string& solver_name) const {
  if (!is_known_solver(solver_name)) throw ConfigError("solver.name", "unknown solver '" + solver_name + "'");
  const bool boxed = problem.kind == ProblemKind::kl_box;
  const auto& s = solver;
  SolverConfig c;
  c.kappa = s.kappa;
  c.epsilon = s.epsilon;
  c.max_outer = s.max_outer;
  c.lbfgs_pairs = s.lbfgs_pairs;
  c.coarse_iters_per_level = s.coarse_iters;
  c.fine_steps_per_level = s.fine_steps;
  c.coarse_solver = s.coarse_solver;
  c.line_search = s.line_search;
  c.box_coarse_step = s.box_coarse_step;
  c.unconstrained_search = LineSearchConfig{s.rho1, s.c2, s.beta, s.alpha0, s.max_trials};
  c.projected_search = LineSearchConfig{s.rho1, s.c2, s.proj_beta, s.alpha0, s.proj_max_trials};
  c.adaptive_initial_step = s.adaptive_initial_step;
  c.tol_rel = s.tol_rel;
  c.tol_abs = s.tol_abs;
  c.exact_tol_rel = s.exact_tol_rel;
  c.exact_max_iters = s.exact_max_iters;
  c.record_wall_time = output.record_wall_time;
  c.snapshot_iterations = s.snapshots;

  const FineMethod plain = boxed ? FineMethod::projected_gd : FineMethod::gradient_descent;
  if (solver_name == "multilevel_geometric" || solver_name == "multilevel_algebraic") {
    c.levels = problem.levels;
    c.coarse_model =
        solver_name == "multilevel_algebraic" ? CoarseModelKind::algebraic : CoarseModelKind::geometric;
    c.fine_method = s.fine_method == "lbfgs" ? FineMethod::lbfgs : plain;
  } else {
    c.levels = 1;
    c.fine_method = solver_name == "lbfgs" ? FineMethod::lbfgs : plain;
  }
  return c;
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", "parse error at line " + std::to_string(e.line()) + ": " + e.message());
  }

  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(section, "key outside of any section");
    }
    const bool known_section = std::any_of(fields().begin(), fields().end(),
                                           [&](const Field& f) { return section == f.section; });
    if (!known_section) throw ConfigError(section, "unknown section");
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const auto it = std::find_if(fields().begin(), fields().end(),
                                   [&](const Field& f) { return section == f.section && key == f.key; });
      if (it == fields().end()) throw ConfigError(full, "unknown key");
      it->set(config, full, trim(node.data()));
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::filesystem::filesystem_error("cannot open config", path, std::make_error_code(std::errc::no_such_file_or_directory));
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& config) {
  std::string current;
  for (const auto& f : fields()) {
    if (current != f.section) {
      out << (current.empty() ? "" : "\n") << '[' << f.section << "]\n";
      current = f.section;
    }
    out << f.key << " = " << f.get(config) << '\n';
  }
}

}  // namespace mlopt::bench
