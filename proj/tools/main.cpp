#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"seatcast: seat-share forecasting from election surveys"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out_dir = "out";

  const char* names[][2] = {
      {"simulate", "simulate one election and write its snapshot"},
      {"survey", "accurate-projection rates of repeated surveys"},
      {"posterior", "rank candidate outcomes by synthetic-likelihood posterior"},
      {"abc", "approximate Bayesian computation posterior"},
      {"forensics", "likelihood ratios for genuine, fake and malicious surveys"},
      {"baseline", "rank candidate outcomes by the conjugate Dirichlet baseline"},
  };
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed, overrides the config");
    sub->add_option("--workers", workers, "worker threads, overrides the config")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    seatcast::cli::CommandContext ctx{seatcast::cli::load_run_config(config_path), out_dir};
    if (seed) ctx.config.seed = *seed;
    if (workers) ctx.config.workers = *workers;
    seatcast::cli::run_command(app.get_subcommands().front()->get_name(), ctx);
  } catch (const seatcast::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
