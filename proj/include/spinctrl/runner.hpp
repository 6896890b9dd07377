// Subcommand orchestration: load a config, dispatch to the engines, write
// CSV data files plus a JSON run manifest.
//
// Determinism contract: the bytes of every CSV output are a pure function of
// (config, seed, tool version).  The manifest (which carries timestamps) is
// written only after all data files are complete.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spinctrl {

struct RunOptions {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;   // overrides the config "seed"
  std::optional<std::string> out_dir;  // overrides the config "output_dir"
  int threads = 1;
  bool validate_only = false;  // parse + validate, run nothing
};

struct CommandInfo {
  std::string name;
  std::string summary;
};

const std::vector<CommandInfo>& command_list();

/// Executes one subcommand.  Returns the process exit code: 0 on success,
/// 1 on configuration errors, 2 on computation errors; the message goes to
/// standard error.
int run_command(const RunOptions& opts);

}  // namespace spinctrl
