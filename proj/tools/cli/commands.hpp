#pragma once

// Subcommands of the `bautin` executable. Exit codes: 0 success,
// 1 computational failure, 2 configuration error.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace bautin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct CommandContext {
  ExperimentConfig config;
  std::filesystem::path out_dir;
  unsigned jobs = 1;
  std::ostream* log = nullptr;  ///< progress and error messages
};

int cmd_hopf_curve(const CommandContext& ctx);
int cmd_simulate(const CommandContext& ctx);
int cmd_classify(const CommandContext& ctx);
int cmd_threshold(const CommandContext& ctx);
int cmd_sweep(const CommandContext& ctx);
int cmd_zones(const CommandContext& ctx);

/// Full command-line entry point; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bautin::cli
