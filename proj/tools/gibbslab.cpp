#include <iostream>

#include "CLI11.hpp"
#include "cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gibbslab: Gibbs-algorithm generalization experiments"};
  app.require_subcommand(1);

  gibbs::cli::Options opts;
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int workers = 0;

  for (const std::string& name : gibbs::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON config with flat dotted keys")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--workers", workers, "OpenMP worker count")->check(CLI::PositiveNumber);
    sub->callback([&, sub, name] {
      opts.command = name;
      if (sub->count("--config")) opts.config_path = config;
      if (sub->count("--seed")) opts.seed = seed;
      if (sub->count("--out")) opts.out_dir = out;
      if (sub->count("--workers")) opts.workers = workers;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gibbs::cli::kExitConfig;
  }
  return gibbs::cli::run(opts, std::cerr);
}
