#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "spinctrl/runner.hpp"
#include "spinctrl/units.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nuclear-spin qubit control simulator and design toolkit"};
  app.set_version_flag("--version", std::string(spinctrl::version));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  bool validate_only = false;

  for (const auto& info : spinctrl::command_list()) {
    CLI::App* sub = app.add_subcommand(info.name, info.summary);
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required();
    sub->add_option("--seed", seed, "Seed override (64-bit)");
    sub->add_option("--out", out_dir, "Output directory override");
    sub->add_option("--threads", threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--validate-only", validate_only,
                  "Check the configuration and exit without running");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  spinctrl::RunOptions opts;
  opts.command = sub->get_name();
  opts.config_path = config_path;
  if (sub->count("--seed") > 0) opts.seed = seed;
  if (sub->count("--out") > 0) opts.out_dir = out_dir;
  opts.threads = threads;
  opts.validate_only = validate_only;
  return spinctrl::run_command(opts);
}
