#include "isiwtc/harness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "isiwtc/channel.hpp"
#include "isiwtc/errors.hpp"
#include "isiwtc/optimizer.hpp"
#include "isiwtc/rate_estimator.hpp"
#include "isiwtc/waterpour.hpp"

namespace isiwtc::harness {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write '" + path.string() + "'");
  out << content;
}

class StageClock {
 public:
  void record(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    timings_[stage] = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
  }
  json to_json() const {
    json j;
    for (const auto& [k, v] : timings_) j[k] = v;
    return j;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  std::map<std::string, double> timings_;
};

json config_json(const RunConfig& c, Command command) {
  json j;
  j["config_version"] = 1;
  j["gb_taps"] = c.gb_taps;
  j["ge_taps"] = c.ge_taps;
  j["es"] = c.es;
  if (command == Command::sweep) {
    j["snrb_db_list"] = c.snrb_db_list;
    j["snre_db_list"] = c.snre_db_list;
    j["init_count"] = c.init_count;
    j["hist_bins"] = c.hist_bins;
  } else {
    if (c.snrb_db) j["snrb_db"] = *c.snrb_db;
    if (c.sigma_b2) j["sigma_b2"] = *c.sigma_b2;
    if (c.snre_db) j["snre_db"] = *c.snre_db;
    if (c.sigma_e2) j["sigma_e2"] = *c.sigma_e2;
  }
  if (command != Command::waterpour) {
    j["nu"] = c.nu;
    j["n"] = c.n;
    j["seed"] = c.seed;
    j["kappa"] = c.kappa;
    j["kappa_prime"] = c.kappa_prime;
    j["tol"] = c.tol;
    j["max_iter"] = c.max_iter;
    j["threads"] = c.threads;
    j["init"] = c.init;
    if (c.init == "weyl") j["init_index"] = c.init_index;
    if (c.init == "file") j["q_path"] = c.q_path;
  } else {
    j["w_min"] = c.w_min;
    j["w_max"] = c.w_max;
    j["w_count"] = c.w_count;
    j["ratio_w"] = c.ratio_w;
    j["ratio_grid_count"] = c.ratio_grid_count;
  }
  return j;
}

void write_manifest(const std::filesystem::path& out_dir, const RunConfig& config, Command command,
                    const char* command_name, const json& derived, const StageClock& clock,
                    const FileList& files) {
  json manifest;
  manifest["artifact"] = "isiwtc";
  manifest["artifact_version"] = "1.0.0";
  manifest["command"] = command_name;
  manifest["config"] = config_json(config, command);
  manifest["derived"] = derived;
  manifest["timings_ms"] = clock.to_json();
  manifest["outputs"] = files;
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

json derived_channel_json(const ChannelSetup& setup) {
  json derived;
  derived["gb_normalized"] = setup.gb.taps();
  derived["ge_normalized"] = setup.ge.taps();
  derived["sigma_b2"] = setup.sigma_b2;
  derived["sigma_e2"] = setup.sigma_e2;
  if (setup.trellis) {
    derived["num_states"] = setup.trellis->num_states();
    derived["num_edges"] = setup.trellis->num_edges();
  }
  return derived;
}

EdgeDistribution initial_distribution(const RunConfig& config, const TrellisPtr& trellis) {
  if (config.init == "iud") return EdgeDistribution::iud(trellis);
  if (config.init == "weyl")
    return weyl_initializations(trellis, config.init_index + 1, config.seed).back();
  std::ifstream in(config.q_path);
  if (!in) throw ConfigError("config error, field 'q_path': cannot open '" + config.q_path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return edge_distribution_from_document(trellis, buffer.str());
}

std::string edges_csv(const EdgeDistribution& q, const TStatistics& stats) {
  std::string csv = "i,j,q,p,t_bob,t_eve,contribution\n";
  const auto& trellis = *q.trellis();
  for (std::size_t k = 0; k < trellis.num_edges(); ++k) {
    const auto& e = trellis.edge(k);
    const double contribution = q.edge_mass()[k] * (stats.bob[k] - stats.eve[k]);
    csv += std::to_string(e.from) + "," + std::to_string(e.to) + "," + fmt(q.edge_mass()[k]) + "," +
           fmt(q.transition()[k]) + "," + fmt(stats.bob[k]) + "," + fmt(stats.eve[k]) + "," +
           fmt(contribution) + "\n";
  }
  return csv;
}

std::string summary_csv(const TStatistics& stats) {
  std::string csv = "rate,bob_term,eve_term,n,block_se,seed_source,seed_bob,seed_eve\n";
  csv += fmt(stats.rate_estimate) + "," + fmt(stats.bob_term) + "," + fmt(stats.eve_term) + "," +
         std::to_string(stats.n) + "," + fmt(stats.block_se) + "," +
         std::to_string(stats.seeds.source) + "," + std::to_string(stats.seeds.bob) + "," +
         std::to_string(stats.seeds.eve) + "\n";
  return csv;
}

}  // namespace

FileList cmd_estimate(const RunConfig& config, const std::filesystem::path& out_dir) {
  validate_config(config, Command::estimate);
  std::filesystem::create_directories(out_dir);
  StageClock clock;

  const ChannelSetup setup = derive_channel_setup(config, Command::estimate);
  const IsiWtcSpec spec(setup.gb, setup.ge, setup.sigma_b2, setup.sigma_e2);
  const EdgeDistribution q = initial_distribution(config, setup.trellis);
  clock.record("setup");

  const TStatistics stats = estimate_secure_rate(q, spec, config.n, SeedBundle::derive(config.seed));
  clock.record("estimate");

  FileList files{"edges.csv", "summary.csv", "resolved_config.cfg", "manifest.json"};
  write_file(out_dir / "edges.csv", edges_csv(q, stats));
  write_file(out_dir / "summary.csv", summary_csv(stats));
  write_file(out_dir / "resolved_config.cfg", resolved_config_text(config, Command::estimate));
  clock.record("write");
  write_manifest(out_dir, config, Command::estimate, "estimate", derived_channel_json(setup), clock,
                 files);
  return files;
}

FileList cmd_optimize(const RunConfig& config, const std::filesystem::path& out_dir) {
  validate_config(config, Command::optimize);
  std::filesystem::create_directories(out_dir);
  StageClock clock;

  const ChannelSetup setup = derive_channel_setup(config, Command::optimize);
  const IsiWtcSpec spec(setup.gb, setup.ge, setup.sigma_b2, setup.sigma_e2);
  const EdgeDistribution q0 = initial_distribution(config, setup.trellis);
  clock.record("setup");

  OptimizeConfig opt;
  opt.n = config.n;
  opt.params.kappa = config.kappa;
  opt.params.kappa_prime = config.kappa_prime;
  opt.tol = config.tol;
  opt.max_iter = config.max_iter;
  opt.seed = config.seed;
  const OptimizeResult result = optimize(q0, spec, opt);
  clock.record("optimize");

  std::string trace = "iteration,rate,block_se,rho,kappa_used,max_abs_dq\n";
  for (const auto& rec : result.trace) {
    trace += std::to_string(rec.iteration) + "," + fmt(rec.rate_entry) + "," + fmt(rec.block_se) +
             "," + fmt(rec.rho) + "," + fmt(rec.kappa_used) + "," + fmt(rec.max_abs_dq) + "\n";
  }
  std::string summary = "rate_final,block_se,iterations,converged,n,seed\n";
  summary += fmt(result.rate_final) + "," + fmt(result.block_se_final) + "," +
             std::to_string(result.iterations) + "," + (result.converged ? "1" : "0") + "," +
             std::to_string(config.n) + "," + std::to_string(config.seed) + "\n";

  FileList files{"trace.csv", "final_q.txt", "summary.csv", "resolved_config.cfg", "manifest.json"};
  write_file(out_dir / "trace.csv", trace);
  write_file(out_dir / "final_q.txt", to_document(result.q_final));
  write_file(out_dir / "summary.csv", summary);
  write_file(out_dir / "resolved_config.cfg", resolved_config_text(config, Command::optimize));
  clock.record("write");
  write_manifest(out_dir, config, Command::optimize, "optimize", derived_channel_json(setup), clock,
                 files);
  return files;
}

FileList cmd_sweep(const RunConfig& config, const std::filesystem::path& out_dir) {
  validate_config(config, Command::sweep);
  std::filesystem::create_directories(out_dir);
  StageClock clock;

  const ChannelSetup setup = derive_channel_setup(config, Command::sweep);
  clock.record("setup");

  SweepConfig sweep_config;
  sweep_config.snrb_db = config.snrb_db_list;
  sweep_config.snre_db = config.snre_db_list;
  sweep_config.gb_taps = setup.gb.taps();
  sweep_config.ge_taps = setup.ge.taps();
  sweep_config.init_count = config.init_count;
  sweep_config.es = config.es;
  sweep_config.opt.n = config.n;
  sweep_config.opt.params.kappa = config.kappa;
  sweep_config.opt.params.kappa_prime = config.kappa_prime;
  sweep_config.opt.tol = config.tol;
  sweep_config.opt.max_iter = config.max_iter;
  sweep_config.opt.seed = config.seed;
  sweep_config.threads = config.threads;
  const auto cells = sweep(setup.trellis, sweep_config);
  clock.record("sweep");

  std::string csv = "cell,snrb_db,snre_db,status,best_rate,best_se,best_init,iud_rate,iud_se\n";
  FileList files;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    csv += std::to_string(c) + "," + fmt(cell.cell.snrb_db) + "," + fmt(cell.cell.snre_db) + "," +
           (cell.ok ? "ok" : "failed") + "," + fmt(cell.best_rate) + "," + fmt(cell.best_se) + "," +
           std::to_string(cell.best_init) + "," + fmt(cell.iud_rate) + "," + fmt(cell.iud_se) + "\n";

    // Normalized histogram of the local optima found in this cell.
    if (!cell.local_optima.empty()) {
      const auto [lo_it, hi_it] = std::minmax_element(cell.local_optima.begin(), cell.local_optima.end());
      double lo = *lo_it, hi = *hi_it;
      if (!(hi > lo)) {
        const double pad = std::max(1e-12, 1e-6 * std::max(1.0, std::abs(lo)));
        lo -= pad;
        hi += pad;
      }
      const int bins = config.hist_bins;
      const double width = (hi - lo) / bins;
      std::vector<std::size_t> counts(bins, 0);
      for (double v : cell.local_optima) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
      }
      std::string hist = "bin_lo,bin_hi,density\n";
      const double total = static_cast<double>(cell.local_optima.size());
      for (int b = 0; b < bins; ++b) {
        hist += fmt(lo + b * width) + "," + fmt(lo + (b + 1) * width) + "," +
                fmt(static_cast<double>(counts[static_cast<std::size_t>(b)]) / (total * width)) + "\n";
      }
      const std::string name = "hist_cell" + std::to_string(c) + ".csv";
      write_file(out_dir / name, hist);
      files.push_back(name);
    }
  }
  files.insert(files.begin(), "sweep.csv");
  files.push_back("resolved_config.cfg");
  files.push_back("manifest.json");
  write_file(out_dir / "sweep.csv", csv);
  write_file(out_dir / "resolved_config.cfg", resolved_config_text(config, Command::sweep));
  clock.record("write");

  json derived = derived_channel_json(setup);
  std::size_t failed = 0;
  for (const auto& cell : cells)
    if (!cell.ok) ++failed;
  derived["cells"] = cells.size();
  derived["failed_cells"] = failed;
  write_manifest(out_dir, config, Command::sweep, "sweep", derived, clock, files);
  return files;
}

FileList cmd_waterpour(const RunConfig& config, const std::filesystem::path& out_dir) {
  validate_config(config, Command::waterpour);
  std::filesystem::create_directories(out_dir);
  StageClock clock;

  const ChannelSetup setup = derive_channel_setup(config, Command::waterpour);
  // The flat PSD is identified numerically with the discrete-time noise
  // variance; see README for this reading of the continuous-time model.
  const double psd_bob = setup.sigma_b2;
  const double psd_eve = setup.sigma_e2;

  std::string capacity = "w,c_bob,c_eve\n";
  for (int k = 0; k < config.w_count; ++k) {
    const double w = config.w_count == 1
                         ? config.w_min
                         : config.w_min + (config.w_max - config.w_min) * k / (config.w_count - 1);
    const SpectralSpec bob(setup.gb, psd_bob, config.es, w);
    const SpectralSpec eve(setup.ge, psd_eve, config.es, w);
    capacity +=
        fmt(w) + "," + fmt(waterpour_capacity(bob).capacity) + "," + fmt(waterpour_capacity(eve).capacity) + "\n";
  }
  clock.record("capacity");

  const SpectralSpec bob(setup.gb, psd_bob, config.es, config.ratio_w);
  const SpectralSpec eve(setup.ge, psd_eve, config.es, config.ratio_w);
  std::vector<double> grid(static_cast<std::size_t>(config.ratio_grid_count));
  for (std::size_t k = 0; k < grid.size(); ++k)
    grid[k] = (static_cast<double>(k) + 0.5) * config.ratio_w / static_cast<double>(grid.size());
  std::string ratio = "f,bob_db,eve_db\n";
  for (const auto& p : gain_to_noise_ratio_curve(bob, eve, grid))
    ratio += fmt(p.f) + "," + fmt(p.bob_db) + "," + fmt(p.eve_db) + "\n";
  clock.record("ratio");

  FileList files{"capacity.csv", "gain_to_noise.csv", "resolved_config.cfg", "manifest.json"};
  write_file(out_dir / "capacity.csv", capacity);
  write_file(out_dir / "gain_to_noise.csv", ratio);
  write_file(out_dir / "resolved_config.cfg", resolved_config_text(config, Command::waterpour));
  clock.record("write");
  write_manifest(out_dir, config, Command::waterpour, "waterpour", derived_channel_json(setup),
                 clock, files);
  return files;
}

}  // namespace isiwtc::harness
