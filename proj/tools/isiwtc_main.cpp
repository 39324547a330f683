// Command-line front end: estimate | optimize | sweep | waterpour.
// Exit codes: 0 ok, 2 config error, 3 numerical error.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "isiwtc/errors.hpp"
#include "isiwtc/harness/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Secure-rate estimation and optimization for finite-input ISI wiretap channels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  int threads_override = 0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file")->required();
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
    cmd->add_option("--threads", threads_override, "override the config worker count");
  };

  add_common(app.add_subcommand("estimate", "Monte-Carlo secure-rate estimate for one source"));
  add_common(app.add_subcommand("optimize", "surrogate-maximization source optimization"));
  add_common(app.add_subcommand("sweep", "optimization sweep over an SNR grid"));
  add_common(app.add_subcommand("waterpour", "water-pouring capacities and spectrum ratios"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    isiwtc::harness::RunConfig config = isiwtc::harness::load_config(config_path);
    if (seed_given) config.seed = seed_override;
    if (threads_override > 0) config.threads = threads_override;

    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "estimate")
      isiwtc::harness::cmd_estimate(config, out_dir);
    else if (command == "optimize")
      isiwtc::harness::cmd_optimize(config, out_dir);
    else if (command == "sweep")
      isiwtc::harness::cmd_sweep(config, out_dir);
    else
      isiwtc::harness::cmd_waterpour(config, out_dir);
    return 0;
  } catch (const isiwtc::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
