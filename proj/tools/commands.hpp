#pragma once

#include <filesystem>
#include <string>

#include "run_config.hpp"

namespace seatcast::cli {

struct CommandContext {
  RunConfig config;
  std::filesystem::path out_dir;
};

/// Each command writes results.json plus CSV plot data into ctx.out_dir.
void cmd_simulate(const CommandContext& ctx);
void cmd_survey(const CommandContext& ctx);
void cmd_posterior(const CommandContext& ctx);
void cmd_abc(const CommandContext& ctx);
void cmd_forensics(const CommandContext& ctx);
void cmd_baseline(const CommandContext& ctx);

/// Dispatches by subcommand name; throws std::invalid_argument for an unknown one.
void run_command(const std::string& name, const CommandContext& ctx);

}  // namespace seatcast::cli
