#ifndef ISIWTC_HARNESS_CONFIG_HPP
#define ISIWTC_HARNESS_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isiwtc/trellis.hpp"

namespace isiwtc::harness {

/// Parsed run configuration. The file format is line-oriented `key = value`
/// with `#` comments; lists are comma-separated. See README for the schema.
struct RunConfig {
  int config_version = 0;

  std::vector<double> gb_taps;  // raw taps; normalized at setup
  std::vector<double> ge_taps;
  double es = 1.0;
  std::optional<double> snrb_db, snre_db;
  std::optional<double> sigma_b2, sigma_e2;
  std::vector<double> snrb_db_list, snre_db_list;  // sweep grids

  int nu = 0;
  std::size_t n = 100000;
  std::uint64_t seed = 0;

  double kappa = 0.9;
  double kappa_prime = 7.5;
  double tol = 1e-4;
  int max_iter = 60;
  std::string init = "iud";  // iud | weyl | file
  std::size_t init_index = 0;
  std::string q_path;        // for init = file
  std::size_t init_count = 100;
  int hist_bins = 30;

  double w_min = 0.25;
  double w_max = 4.0;
  int w_count = 16;
  double ratio_w = 0.5;
  int ratio_grid_count = 512;

  int threads = 1;

  /// Line number per key, for field-precise error messages.
  std::map<std::string, int> key_lines;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Normalized channels, noise variances and (optionally) the joint trellis
/// derived from a validated config.
struct ChannelSetup {
  TransferPolynomial gb;
  TransferPolynomial ge;
  double sigma_b2 = 0.0;
  double sigma_e2 = 0.0;
  Alphabet alphabet;
  TrellisPtr trellis;  // null when the command does not need one
};

enum class Command { estimate, optimize, sweep, waterpour };

/// Per-command config validation; throws ConfigError naming the offending
/// field (and its line when it was given explicitly).
void validate_config(const RunConfig& config, Command command);

ChannelSetup derive_channel_setup(const RunConfig& config, Command command);

/// Config re-serialized with every value resolved (including defaults); a
/// valid config file whose re-run reproduces this run bit for bit.
std::string resolved_config_text(const RunConfig& config, Command command);

}  // namespace isiwtc::harness

#endif
