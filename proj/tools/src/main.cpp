#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "perhf/cli.hpp"
#include "perhf/error.hpp"
#include "perhf/parallel.hpp"

int main(int argc, char **argv) {
  using namespace perhf;
  CLI::App app{"Plane-wave periodic Hartree-Fock solver"};
  app.require_subcommand(1);
  int threads = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  app.add_option("--threads", threads, "worker threads for per-fiber work")
      ->check(CLI::PositiveNumber);
  auto *seed_opt = app.add_option("--seed", seed, "seed for randomized checks");

  std::string config_path, out_dir = ".", snapshot_path, checks = "all";
  auto *solve = app.add_subcommand("solve", "run SCF, verify, write outputs");
  solve->add_option("config", config_path, "config file")->required();
  solve->add_option("--out-dir", out_dir, "output directory");

  auto *verify = app.add_subcommand("verify", "re-check a saved state snapshot");
  verify->add_option("snapshot", snapshot_path, "snapshot file")->required();
  verify->add_option("--checks", checks, "all or a comma-separated list");

  auto *compare = app.add_subcommand("compare", "solve hf and reduced, compare");
  compare->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::bad_config;
  }
  seed_given = seed_opt->count() > 0;
  set_num_threads(threads);

  try {
    if (*solve) {
      auto manifest = cli::make_manifest(config_path, out_dir);
      if (seed_given)
        manifest.config.seed = seed;
      return cli::run(manifest, std::cout);
    }
    if (*verify)
      return cli::run_verify(snapshot_path, cli::parse_checks(checks), seed, std::cout);
    if (*compare) {
      auto config = cli::load_config(config_path);
      if (seed_given)
        config.seed = seed;
      return cli::run_compare(config, std::cout);
    }
  } catch (const Error &e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    if (e.kind() == ErrorKind::invalid_parameter || e.kind() == ErrorKind::io_error ||
        e.kind() == ErrorKind::capacity_error)
      return cli::bad_config;
    return EXIT_FAILURE;
  }
  return EXIT_FAILURE;
}
