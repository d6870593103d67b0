#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lostsales/app/commands.hpp"
#include "lostsales/app/config.hpp"
#include "lostsales/app/manifest.hpp"
#include "lostsales/error.hpp"

using namespace lostsales;

int main(int argc, char** argv) {
  CLI::App cli{"Lost-sales inventory experiments: constants, Lindley analysis, DP, simulation and bounds"};
  cli.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  cli.add_option("-c,--config", config_path, "JSON experiment config");
  cli.add_option("--seed", seed, "root seed override");
  cli.add_option("--out", out, "output directory override");
  cli.add_option("--threads", threads, "worker threads (0 = all cores)");

  const char* help[] = {
      "newsvendor scalars, m, theta and y(eps) with the L-threshold certificate",
      "stationary supremum law and tail-bound suite per rate",
      "best constant order rate z",
      "finite-horizon dynamic program",
      "simulate or exactly evaluate a policy",
      "window lower-bound optimiser with cap and margin checks",
      "gap certificate for the constant order at r*",
      "OPT versus the best constant-order policy over a grid",
      "run the acceptance suite",
  };
  for (std::size_t i = 0; i < app::command_names().size(); ++i) {
    cli.add_subcommand(app::command_names()[i], help[i])->fallthrough();
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : app::kConfigError;
  }
  const std::string command = cli.get_subcommands().front()->get_name();

  try {
    auto cfg = config_path.empty() ? app::default_config() : app::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    if (threads) cfg.threads = *threads;

    app::RunManifest manifest(command, cfg.hash(), cfg.seed, cfg.out / command);
    manifest.write_json("config.json", cfg.to_json());
    int rc = app::kSuccess;
    try {
      rc = app::run_command(command, cfg, manifest, std::cout);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      rc = app::exit_code_for(e.code());
    }
    manifest.finish(rc);
    return rc;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app::kConfigError;
  }
}
