#include "isiwtc/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "isiwtc/channel.hpp"
#include "isiwtc/errors.hpp"

namespace isiwtc::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
  throw ConfigError("config error, line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) fail_line(line, "trailing characters in number '" + value + "'");
    if (!std::isfinite(v)) fail_line(line, "number '" + value + "' is not finite");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail_line(line, "cannot parse number '" + value + "'");
  }
}

std::vector<double> parse_double_list(const std::string& value, int line) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) fail_line(line, "empty list element");
    out.push_back(parse_double(item, line));
  }
  if (out.empty()) fail_line(line, "empty list");
  return out;
}

long long parse_int(const std::string& value, int line, long long lo, long long hi) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) fail_line(line, "trailing characters in integer '" + value + "'");
    if (v < lo || v > hi) fail_line(line, "integer '" + value + "' out of range");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail_line(line, "cannot parse integer '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) fail_line(line, "trailing characters in integer '" + value + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail_line(line, "cannot parse unsigned integer '" + value + "'");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool saw_version = false;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail_line(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail_line(line_no, "missing key");
    if (value.empty()) fail_line(line_no, "missing value for '" + key + "'");
    if (config.key_lines.count(key)) fail_line(line_no, "duplicate key '" + key + "'");
    config.key_lines[key] = line_no;

    if (key == "config_version") {
      config.config_version = static_cast<int>(parse_int(value, line_no, 1, 1));
      saw_version = true;
    } else if (key == "gb_taps") {
      config.gb_taps = parse_double_list(value, line_no);
    } else if (key == "ge_taps") {
      config.ge_taps = parse_double_list(value, line_no);
    } else if (key == "es") {
      config.es = parse_double(value, line_no);
    } else if (key == "snrb_db") {
      config.snrb_db = parse_double(value, line_no);
    } else if (key == "snre_db") {
      config.snre_db = parse_double(value, line_no);
    } else if (key == "sigma_b2") {
      config.sigma_b2 = parse_double(value, line_no);
    } else if (key == "sigma_e2") {
      config.sigma_e2 = parse_double(value, line_no);
    } else if (key == "snrb_db_list") {
      config.snrb_db_list = parse_double_list(value, line_no);
    } else if (key == "snre_db_list") {
      config.snre_db_list = parse_double_list(value, line_no);
    } else if (key == "nu") {
      config.nu = static_cast<int>(parse_int(value, line_no, 1, 16));
    } else if (key == "n") {
      config.n = static_cast<std::size_t>(parse_int(value, line_no, 1, 1LL << 40));
    } else if (key == "seed") {
      config.seed = parse_u64(value, line_no);
    } else if (key == "kappa") {
      config.kappa = parse_double(value, line_no);
    } else if (key == "kappa_prime") {
      config.kappa_prime = parse_double(value, line_no);
    } else if (key == "tol") {
      config.tol = parse_double(value, line_no);
    } else if (key == "max_iter") {
      config.max_iter = static_cast<int>(parse_int(value, line_no, 0, 1000000));
    } else if (key == "init") {
      if (value != "iud" && value != "weyl" && value != "file")
        fail_line(line_no, "init must be one of: iud, weyl, file");
      config.init = value;
    } else if (key == "init_index") {
      config.init_index = static_cast<std::size_t>(parse_int(value, line_no, 0, 1 << 20));
    } else if (key == "q_path") {
      config.q_path = value;
    } else if (key == "init_count") {
      config.init_count = static_cast<std::size_t>(parse_int(value, line_no, 1, 1 << 20));
    } else if (key == "hist_bins") {
      config.hist_bins = static_cast<int>(parse_int(value, line_no, 1, 1 << 20));
    } else if (key == "w_min") {
      config.w_min = parse_double(value, line_no);
    } else if (key == "w_max") {
      config.w_max = parse_double(value, line_no);
    } else if (key == "w_count") {
      config.w_count = static_cast<int>(parse_int(value, line_no, 0, 1 << 20));
    } else if (key == "ratio_w") {
      config.ratio_w = parse_double(value, line_no);
    } else if (key == "ratio_grid_count") {
      config.ratio_grid_count = static_cast<int>(parse_int(value, line_no, 1, 1 << 24));
    } else if (key == "threads") {
      config.threads = static_cast<int>(parse_int(value, line_no, 1, 4096));
    } else {
      fail_line(line_no, "unknown key '" + key + "'");
    }
  }
  if (!saw_version) throw ConfigError("config error: missing required key 'config_version'");
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

namespace {

[[noreturn]] void fail_field(const RunConfig& config, const std::string& field,
                             const std::string& msg) {
  const auto it = config.key_lines.find(field);
  if (it != config.key_lines.end())
    throw ConfigError("config error, line " + std::to_string(it->second) + ", field '" + field +
                      "': " + msg);
  throw ConfigError("config error, field '" + field + "': " + msg);
}

void validate_channel_fields(const RunConfig& c, bool sweep_grids) {
  if (c.gb_taps.empty()) fail_field(c, "gb_taps", "required");
  if (c.ge_taps.empty()) fail_field(c, "ge_taps", "required");
  if (!(c.es > 0.0)) fail_field(c, "es", "must be positive");
  if (sweep_grids) {
    if (c.snrb_db_list.empty()) fail_field(c, "snrb_db_list", "required for sweep");
    if (c.snre_db_list.empty()) fail_field(c, "snre_db_list", "required for sweep");
    if (c.snrb_db || c.sigma_b2 || c.snre_db || c.sigma_e2)
      fail_field(c, "snrb_db", "sweep uses snrb_db_list/snre_db_list, not scalar noise fields");
  } else {
    if (c.snrb_db.has_value() == c.sigma_b2.has_value())
      fail_field(c, "snrb_db", "exactly one of snrb_db or sigma_b2 is required");
    if (c.snre_db.has_value() == c.sigma_e2.has_value())
      fail_field(c, "snre_db", "exactly one of snre_db or sigma_e2 is required");
    if (c.sigma_b2 && !(*c.sigma_b2 > 0.0)) fail_field(c, "sigma_b2", "must be positive");
    if (c.sigma_e2 && !(*c.sigma_e2 > 0.0)) fail_field(c, "sigma_e2", "must be positive");
  }
}

void validate_source_fields(const RunConfig& c) {
  const std::size_t mb = TransferPolynomial(c.gb_taps).memory();
  const std::size_t me = TransferPolynomial(c.ge_taps).memory();
  if (c.nu < 1) fail_field(c, "nu", "required, must be at least 1");
  if (static_cast<std::size_t>(c.nu) < std::max(mb, me))
    fail_field(c, "nu", "must be at least the larger channel memory (" +
                            std::to_string(std::max(mb, me)) + ")");
}

void validate_optimizer_fields(const RunConfig& c) {
  if (!(c.kappa > 0.0) || c.kappa > 1.0) fail_field(c, "kappa", "must be in (0, 1]");
  if (!(c.kappa_prime > 0.0)) fail_field(c, "kappa_prime", "must be positive");
  if (!(c.tol > 0.0)) fail_field(c, "tol", "must be positive");
  if (c.init == "file" && c.q_path.empty()) fail_field(c, "q_path", "required for init = file");
}

}  // namespace

void validate_config(const RunConfig& config, Command command) {
  if (config.config_version != 1) fail_field(config, "config_version", "must be 1");
  switch (command) {
    case Command::estimate:
      validate_channel_fields(config, false);
      validate_source_fields(config);
      validate_optimizer_fields(config);  // init selection reuses these fields
      break;
    case Command::optimize:
      validate_channel_fields(config, false);
      validate_source_fields(config);
      validate_optimizer_fields(config);
      break;
    case Command::sweep:
      validate_channel_fields(config, true);
      validate_source_fields(config);
      validate_optimizer_fields(config);
      break;
    case Command::waterpour:
      validate_channel_fields(config, false);
      if (!(config.w_min > 0.0)) fail_field(config, "w_min", "must be positive");
      if (config.w_count < 1) fail_field(config, "w_count", "grid must have at least one point");
      if (config.w_count > 1 && !(config.w_max > config.w_min))
        fail_field(config, "w_max", "zero-width grid: w_max must exceed w_min");
      if (!(config.ratio_w > 0.0)) fail_field(config, "ratio_w", "must be positive");
      break;
  }
}

ChannelSetup derive_channel_setup(const RunConfig& config, Command command) {
  const TransferPolynomial gb = normalize(TransferPolynomial(config.gb_taps));
  const TransferPolynomial ge = normalize(TransferPolynomial(config.ge_taps));

  double sb2 = 0.0, se2 = 0.0;
  if (command != Command::sweep) {
    sb2 = config.sigma_b2 ? *config.sigma_b2 : noise_variance_from_snr_db(config.es, *config.snrb_db);
    se2 = config.sigma_e2 ? *config.sigma_e2 : noise_variance_from_snr_db(config.es, *config.snre_db);
  }

  ChannelSetup setup{gb, ge, sb2, se2, Alphabet::bpsk(config.es), nullptr};
  if (command != Command::waterpour) {
    // The trellis does not depend on the noise levels, so sweep builds it once
    // here with placeholder variances.
    const IsiWtcSpec spec(gb, ge, command == Command::sweep ? 1.0 : sb2,
                          command == Command::sweep ? 1.0 : se2);
    setup.trellis = build_joint_trellis(setup.alphabet, config.nu, spec);
  }
  return setup;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ", ";
    out += fmt(v[k]);
  }
  return out;
}

}  // namespace

std::string resolved_config_text(const RunConfig& c, Command command) {
  std::string out;
  out += "config_version = 1\n";
  out += "gb_taps = " + fmt_list(c.gb_taps) + "\n";
  out += "ge_taps = " + fmt_list(c.ge_taps) + "\n";
  out += "es = " + fmt(c.es) + "\n";
  if (command == Command::sweep) {
    out += "snrb_db_list = " + fmt_list(c.snrb_db_list) + "\n";
    out += "snre_db_list = " + fmt_list(c.snre_db_list) + "\n";
  } else {
    if (c.sigma_b2)
      out += "sigma_b2 = " + fmt(*c.sigma_b2) + "\n";
    else
      out += "snrb_db = " + fmt(*c.snrb_db) + "\n";
    if (c.sigma_e2)
      out += "sigma_e2 = " + fmt(*c.sigma_e2) + "\n";
    else
      out += "snre_db = " + fmt(*c.snre_db) + "\n";
  }
  if (command != Command::waterpour) {
    out += "nu = " + std::to_string(c.nu) + "\n";
    out += "n = " + std::to_string(c.n) + "\n";
    out += "seed = " + std::to_string(c.seed) + "\n";
    out += "kappa = " + fmt(c.kappa) + "\n";
    out += "kappa_prime = " + fmt(c.kappa_prime) + "\n";
    out += "tol = " + fmt(c.tol) + "\n";
    out += "max_iter = " + std::to_string(c.max_iter) + "\n";
    out += "threads = " + std::to_string(c.threads) + "\n";
  }
  if (command == Command::estimate || command == Command::optimize) {
    out += "init = " + c.init + "\n";
    if (c.init == "weyl") out += "init_index = " + std::to_string(c.init_index) + "\n";
    if (c.init == "file") out += "q_path = " + c.q_path + "\n";
  }
  if (command == Command::sweep) {
    out += "init_count = " + std::to_string(c.init_count) + "\n";
    out += "hist_bins = " + std::to_string(c.hist_bins) + "\n";
  }
  if (command == Command::waterpour) {
    out += "w_min = " + fmt(c.w_min) + "\n";
    out += "w_max = " + fmt(c.w_max) + "\n";
    out += "w_count = " + std::to_string(c.w_count) + "\n";
    out += "ratio_w = " + fmt(c.ratio_w) + "\n";
    out += "ratio_grid_count = " + std::to_string(c.ratio_grid_count) + "\n";
  }
  return out;
}

}  // namespace isiwtc::harness
