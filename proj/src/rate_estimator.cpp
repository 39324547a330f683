#include "isiwtc/rate_estimator.hpp"

#include <cmath>
#include <thread>

#include "isiwtc/channel.hpp"
#include "isiwtc/errors.hpp"

namespace isiwtc {

namespace {

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Per-time contribution of one party to the rate estimate,
//   c_t = sum_e P_t(e) log P_t(e) - sum_i P_t(i) log P_t(i),
// which is algebraically the Q-weighted sum of its per-edge T terms.
std::vector<double> per_time_contribution(const PosteriorTables& tables) {
  std::vector<double> c(tables.n, 0.0);
  for (std::size_t t = 0; t < tables.n; ++t) {
    double acc = 0.0;
    const double* pair = &tables.pairwise[t * tables.num_edges];
    const double* single = &tables.single[t * tables.num_states];
    for (std::size_t k = 0; k < tables.num_edges; ++k) acc += xlogx(pair[k]);
    for (std::size_t i = 0; i < tables.num_states; ++i) acc -= xlogx(single[i]);
    c[t] = acc;
  }
  return c;
}

}  // namespace

std::vector<double> t_statistics(const EdgeDistribution& q, const PosteriorTables& posteriors) {
  const auto& trellis = *q.trellis();
  if (posteriors.num_edges != trellis.num_edges() || posteriors.num_states != trellis.num_states())
    throw InvalidInputError("t_statistics: posterior tables do not match the trellis");
  const std::size_t n = posteriors.n;
  const std::size_t ne = trellis.num_edges();

  std::vector<double> t_values(ne, 0.0);
  for (std::size_t k = 0; k < ne; ++k) {
    const std::uint32_t i = trellis.edge(k).from;
    const double mass = q.edge_mass()[k];  // mu_i p_ij
    const double mu = q.stationary()[i];
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      // 0 log 0 := 0; positive posterior mass on a zero-prior edge or state
      // cannot occur and is reported rather than clipped.
      const double pair = posteriors.pairwise[t * ne + k];
      if (pair > 0.0) {
        if (!(mass > 1e-300))
          throw NumericalError("t_statistics: posterior mass on an edge with vanishing prior");
        acc += pair * std::log(pair) / mass;
      }
      const double single = posteriors.single[t * posteriors.num_states + i];
      if (single > 0.0) {
        if (!(mu > 1e-300))
          throw NumericalError("t_statistics: posterior mass on a state with vanishing prior");
        acc -= single * std::log(single) / mu;
      }
    }
    t_values[k] = acc / static_cast<double>(n);
  }
  return t_values;
}

TStatistics estimate_secure_rate(const EdgeDistribution& q, const IsiWtcSpec& spec, std::size_t n,
                                 const SeedBundle& seeds) {
  const auto sample = sample_sequence(q, n, seeds.source);
  const auto obs = transmit(sample, spec, *q.trellis(), seeds.bob, seeds.eve);

  PosteriorTables tables_bob, tables_eve;
  std::exception_ptr eve_error;
  std::thread eve_thread([&] {
    try {
      tables_eve = smooth(q, obs.eve, spec.sigma_e2, Party::eve);
    } catch (...) {
      eve_error = std::current_exception();
    }
  });
  tables_bob = smooth(q, obs.bob, spec.sigma_b2, Party::bob);
  eve_thread.join();
  if (eve_error) std::rethrow_exception(eve_error);

  TStatistics stats;
  stats.n = n;
  stats.seeds = seeds;
  stats.bob = t_statistics(q, tables_bob);
  stats.eve = t_statistics(q, tables_eve);
  for (std::size_t k = 0; k < stats.bob.size(); ++k) {
    stats.bob_term += q.edge_mass()[k] * stats.bob[k];
    stats.eve_term += q.edge_mass()[k] * stats.eve[k];
  }
  stats.rate_estimate = stats.bob_term - stats.eve_term;

  // Block standard error from the per-time rate contributions.
  const auto cb = per_time_contribution(tables_bob);
  const auto ce = per_time_contribution(tables_eve);
  const std::size_t blocks = std::min(kSeBlocks, n);
  const std::size_t block_len = n / blocks;
  std::vector<double> block_mean(blocks, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    double acc = 0.0;
    for (std::size_t t = b * block_len; t < (b + 1) * block_len; ++t) acc += cb[t] - ce[t];
    block_mean[b] = acc / static_cast<double>(block_len);
  }
  double mean = 0.0;
  for (double v : block_mean) mean += v;
  mean /= static_cast<double>(blocks);
  double var = 0.0;
  for (double v : block_mean) var += (v - mean) * (v - mean);
  if (blocks > 1) var /= static_cast<double>(blocks - 1);
  stats.block_se = std::sqrt(var / static_cast<double>(blocks));
  return stats;
}

}  // namespace isiwtc
