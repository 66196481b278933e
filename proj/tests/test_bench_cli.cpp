#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mlopt/io.hpp"
#include "mlopt_bench/config.hpp"
#include "mlopt_bench/runner.hpp"

using namespace mlopt;
using namespace mlopt::bench;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = MLOPT_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mlopt_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MLOPT_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("config round trip through write_config") {
  for (const char* name : {"huber_tv.ini", "kl_box.ini", "quadratic.ini", "lipschitz.ini"}) {
    const ExperimentConfig c = load_config(kConfigs / name);
    std::ostringstream out;
    write_config(out, c);
    CHECK(parse(out.str()) == c);
  }
  ExperimentConfig c;
  c.solver.kappa = 0.1 + 0.2;
  c.solver.snapshots = {1, 7};
  c.compare.solvers = {"gd", "pgd"};
  c.problem.kind = ProblemKind::kl_box;
  std::ostringstream out;
  write_config(out, c);
  CHECK(parse(out.str()) == c);
}

TEST_CASE("malformed configs name the offending key") {
  auto key_of = [](const std::string& text) {
    try {
      parse(text).validate();
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of("[solver]\nkappa = abc\n") == "solver.kappa");
  CHECK(key_of("[solver]\nkappa = 1.5\n") == "solver.kappa");
  CHECK(key_of("[solver]\nkapa = 0.5\n") == "solver.kapa");
  CHECK(key_of("[problem]\nside = 1\nlevels = 1\n") == "problem.side");
  CHECK(key_of("[problem]\nside = 24\nlevels = 5\n") == "problem.levels");
  CHECK(key_of("[problem]\nkind = shepp\n") == "problem.kind");
  CHECK(key_of("[compare]\nsolvers = gd,newton\n") == "compare.solvers");
  CHECK(key_of("[weird]\nx = 1\n") == "weird");
  CHECK(key_of("[solver]\nkappa = 0.5\n") == "<none>");
}

TEST_CASE("solver variants map onto solver configurations") {
  ExperimentConfig c = load_config(kConfigs / "kl_box.ini");
  CHECK(c.solver_config("pgd").levels == 1);
  CHECK(c.solver_config("pgd").fine_method == FineMethod::projected_gd);
  CHECK(c.solver_config("multilevel_geometric").levels == c.problem.levels);
  CHECK(c.solver_config("multilevel_algebraic").coarse_model == CoarseModelKind::algebraic);
}

TEST_CASE("cli exit codes") {
  const fs::path out = scratch("codes");
  CHECK(run_cli("solve --config \"" + (kConfigs / "quadratic.ini").string() + "\" --out \"" + out.string() + "\"") == 0);
  CHECK(fs::exists(out / "trace.csv"));
  CHECK(fs::exists(out / "summary.json"));

  const fs::path bad = out / "bad.ini";
  std::ofstream(bad) << "[solver]\nkappa = -1\n";
  CHECK(run_cli("solve --config \"" + bad.string() + "\" --out \"" + out.string() + "\"") == 2);
  CHECK(run_cli("solve --config \"" + (out / "nope.ini").string() + "\" --out \"" + out.string() + "\"") == 3);
  CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("compare output is byte-identical across runs without wall time") {
  const fs::path a = scratch("cmp_a");
  const fs::path b = scratch("cmp_b");
  const std::string cfg = (kConfigs / "quadratic.ini").string();
  REQUIRE(run_cli("compare --config \"" + cfg + "\" --out \"" + a.string() + "\"") == 0);
  REQUIRE(run_cli("compare --config \"" + cfg + "\" --out \"" + b.string() + "\"") == 0);
  int files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b / rel), rel.string());
    ++files;
  }
  CHECK(files >= 5);
  CHECK(fs::exists(a / "rel_table.csv"));
}

TEST_CASE("multilevel trace holds coarse and fine rows under the fixed header") {
  const fs::path out = scratch("trace");
  REQUIRE(run_cli("solve --config \"" + (kConfigs / "quadratic.ini").string() + "\" --out \"" + out.string() + "\"") == 0);
  std::ifstream in(out / "trace.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == ConvergenceTrace::kHeader);
  bool coarse = false;
  bool fine = false;
  bool deeper = false;
  while (std::getline(in, line)) {
    coarse = coarse || line.find(",coarse,") != std::string::npos;
    fine = fine || line.find(",fine,") != std::string::npos;
    std::istringstream row(line);
    std::string k, level;
    std::getline(row, k, ',');
    std::getline(row, level, ',');
    deeper = deeper || level != "0";
  }
  CHECK(coarse);
  CHECK(fine);
  CHECK(deeper);
}

TEST_CASE("lipschitz subcommand") {
  const fs::path cfg = scratch("lip") / "lip.ini";
  std::ofstream(cfg) << "[problem]\nside = 32\nlevels = 2\n";
  const fs::path out = cfg.parent_path();
  REQUIRE(run_cli("lipschitz --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"") == 0);
  std::ifstream in(out / "lipschitz.csv");
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "level,side,n,m,norm_A,norm_At,L_psi,omega,L_phi_bound,converged");
  int rows = 0;
  while (std::getline(in, row)) {
    std::istringstream s(row);
    std::string cell;
    for (int i = 0; i < 7; ++i) std::getline(s, cell, ',');
    CHECK(std::stod(cell) >= 80.0);  // at least the regularizer's 8 lambda / rho
    ++rows;
  }
  CHECK(rows == 2);
}
