#ifndef ISIWTC_RATE_ESTIMATOR_HPP
#define ISIWTC_RATE_ESTIMATOR_HPP

#include <cstdint>
#include <vector>

#include "isiwtc/rng.hpp"
#include "isiwtc/smoother.hpp"
#include "isiwtc/source_model.hpp"

namespace isiwtc {

/// Per-edge conditional-entropy-difference statistics and the secure-rate
/// estimate they induce. All values in nats.
struct TStatistics {
  std::vector<double> bob;  // T-hat^B_ij per edge
  std::vector<double> eve;  // T-hat^E_ij per edge
  std::size_t n = 0;
  double rate_estimate = 0.0;  // sum_ij Q_ij (tB_ij - tE_ij)
  double bob_term = 0.0;       // sum_ij Q_ij tB_ij
  double eve_term = 0.0;       // sum_ij Q_ij tE_ij
  double block_se = 0.0;       // 20-block standard error of the time average
  SeedBundle seeds;
};

/// Per-edge T values from one posterior table:
///   T_ij = (1/n) sum_t [ P_t(i,j)/(mu_i p_ij) log P_t(i,j) - P_t(i)/mu_i log P_t(i) ]
/// with 0 log 0 := 0. The tables must have been smoothed under the same Q.
std::vector<double> t_statistics(const EdgeDistribution& q, const PosteriorTables& posteriors);

/// One Monte-Carlo secure-rate estimate: sample a source path, push it through
/// both channels, smooth each observation sequence, and combine the per-edge
/// statistics. Bob's and Eve's smoothing runs on two threads.
TStatistics estimate_secure_rate(const EdgeDistribution& q, const IsiWtcSpec& spec, std::size_t n,
                                 const SeedBundle& seeds);

/// Number of segments used for the block standard error.
inline constexpr std::size_t kSeBlocks = 20;

}  // namespace isiwtc

#endif
