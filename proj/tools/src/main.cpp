#include <filesystem>
#include <iostream>
#include <optional>
#include <utility>

#include <CLI11.hpp>

#include "mlopt/io.hpp"
#include "mlopt_bench/runner.hpp"

using namespace mlopt::bench;

int main(int argc, char** argv) {
  CLI::App app{"mlopt: multilevel optimization benchmark harness"};
  app.require_subcommand(1);

  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> levels;
  std::optional<int> side;

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "run [solver] name on the configured problem"},
      {"compare", "run every solver in [compare] solvers and tabulate relative objectives"},
      {"lipschitz", "estimate gradient Lipschitz constants on every level"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config (INI)")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "override problem.seed");
    sub->add_option("--levels", levels, "override problem.levels");
    sub->add_option("--side", side, "override problem.side");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig config = load_config(config_path);
    if (seed) config.problem.seed = *seed;
    if (levels) config.problem.levels = *levels;
    if (side) config.problem.side = *side;
    config.validate();

    int code = kExitOk;
    if (command == "solve") code = cmd_solve(config, out_dir);
    if (command == "compare") code = cmd_compare(config, out_dir);
    if (command == "lipschitz") code = cmd_lipschitz(config, out_dir);
    if (code != kExitOk) std::cerr << "mlopt " << command << ": solver did not converge (see summary.json)\n";
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const mlopt::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
