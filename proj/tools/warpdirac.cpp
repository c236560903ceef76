#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "warpdirac/app.hpp"

int main(int argc, char** argv) {
  using namespace warpdirac;

  CLI::App cli{"Radial Dirac evolution and dispersive-estimate laboratory"};
  cli.require_subcommand(1);
  cli.fallthrough();  // options may follow the subcommand

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  long long seed = -1;
  cli.add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
  cli.add_option("--out", out_dir, "output directory (overrides WARPDIRAC_OUT and the config)");
  cli.add_option("--threads", threads, "worker threads (default: available parallelism)")->check(CLI::NonNegativeNumber);
  cli.add_option("--seed", seed, "seed for random test functions")->check(CLI::NonNegativeNumber);

  const char* names[] = {"check-metric", "spectrum", "validate", "evolve", "strichartz-scan"};
  const char* help[] = {"admissibility report per mode", "mode table as CSV", "operator conformance checks",
                        "evolve initial data and write trajectories", "mu-growth scan of the norm ratios"};
  for (int i = 0; i < 5; ++i) cli.add_subcommand(names[i], help[i]);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kExitConfiguration;
  }

  try {
    RunConfig config = load_config(config_path);
    if (const char* env = std::getenv("WARPDIRAC_OUT"); env && *env) config.output_dir = env;
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (threads > 0) config.threads = threads;
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    const Command command = parse_command(cli.get_subcommands().front()->get_name());
    return run(config, command, std::cerr);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
