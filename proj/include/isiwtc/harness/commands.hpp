#ifndef ISIWTC_HARNESS_COMMANDS_HPP
#define ISIWTC_HARNESS_COMMANDS_HPP

#include <filesystem>
#include <vector>

#include "isiwtc/harness/config.hpp"

namespace isiwtc::harness {

/// Files written by a command, relative to the output directory.
using FileList = std::vector<std::string>;

FileList cmd_estimate(const RunConfig& config, const std::filesystem::path& out_dir);
FileList cmd_optimize(const RunConfig& config, const std::filesystem::path& out_dir);
FileList cmd_sweep(const RunConfig& config, const std::filesystem::path& out_dir);
FileList cmd_waterpour(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace isiwtc::harness

#endif
