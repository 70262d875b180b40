#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cloaklab/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cloaklab: numerical experiments for singular cloaking on flat tori"};
  app.require_subcommand(1);

  std::string config_path, suite, out_dir;
  int threads = 0;

  CLI::App* run = app.add_subcommand("run", "Run the suites selected by a config file");
  run->add_option("config", config_path, "Config file (JSON or key/value text)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--suite", suite,
                  "Override the configured suite "
                  "(sweep|spectrum|capacity|conductivity|surgery|all)");
  run->add_option("--out", out_dir, "Override the output directory");
  run->add_option("--threads", threads, "Override the worker thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    return cloaklab::run_experiment(config_path, suite, out_dir, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
