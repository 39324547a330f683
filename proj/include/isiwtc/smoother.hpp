#ifndef ISIWTC_SMOOTHER_HPP
#define ISIWTC_SMOOTHER_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "isiwtc/source_model.hpp"

namespace isiwtc {

/// Per-time posteriors given one observation sequence:
///   single(t, i)  = p(S_{t-1} = i | obs_1^n)         (t = 1..n)
///   pairwise(t,e) = p(S_{t-1} = i_e, S_t = j_e | obs_1^n)
/// single is the marginal of pairwise over outgoing edges, so marginal
/// consistency holds by construction.
struct PosteriorTables {
  std::size_t n = 0;
  std::size_t num_states = 0;
  std::size_t num_edges = 0;
  std::vector<double> single;    // row-major, n x num_states
  std::vector<double> pairwise;  // row-major, n x num_edges

  double single_at(std::size_t t, std::size_t state) const {
    return single[(t - 1) * num_states + state];
  }
  double pairwise_at(std::size_t t, std::size_t edge) const {
    return pairwise[(t - 1) * num_edges + edge];
  }
};

/// Channel selector shared by the smoother and the estimator.
enum class Party { bob, eve };

/// Log-domain forward-backward smoother over the joint trellis; the forward
/// recursion starts from the stationary distribution and the backward one from
/// all-ones. Metrics are shifted by the row maximum at every step, and the
/// Gaussian normalization constant is dropped (it cancels in the posteriors).
PosteriorTables smooth(const EdgeDistribution& q, std::span<const double> observations,
                       double noise_variance, Party which);

}  // namespace isiwtc

#endif
