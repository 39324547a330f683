#ifndef ISIWTC_TESTS_ORACLES_HPP
#define ISIWTC_TESTS_ORACLES_HPP

#include <span>
#include <vector>

#include "isiwtc/optimizer.hpp"
#include "isiwtc/smoother.hpp"
#include "isiwtc/source_model.hpp"

namespace isiwtc::oracles {

// Exact posteriors by enumerating every state path, weighting with the prior
// and the full Gaussian likelihood (normalization constants included, unlike
// the smoother, so agreement also vouches for the dropped-constant argument).
// Only usable for tiny instances.
PosteriorTables brute_force_posteriors(const EdgeDistribution& q, std::span<const double> obs,
                                       double noise_variance, Party which);

// Literal per-edge evaluation of the T definition from any posterior tables.
std::vector<double> t_from_posteriors(const EdgeDistribution& q, const PosteriorTables& tables);

// Independent surrogate maximizer: gradient ascent projected onto the affine
// hull of the polytope, with backtracking line search. Valid whenever the
// affine-hull maximum is feasible (which the kappa bound guarantees).
struct ProjectedGradientResult {
  std::vector<double> q;
  double value = 0.0;
  int iterations = 0;
};
ProjectedGradientResult maximize_surrogate_projected_gradient(const EdgeDistribution& qtilde,
                                                              std::span<const double> t_bob,
                                                              std::span<const double> t_eve,
                                                              const SurrogateParams& params);

// Second independent route for the 2-state full trellis: exhaustive grid with
// repeated zoom over the two free coordinates (q00, q01 = q10).
double grid_maximize_surrogate_2state(const EdgeDistribution& qtilde,
                                      std::span<const double> t_bob,
                                      std::span<const double> t_eve,
                                      const SurrogateParams& params);

}  // namespace isiwtc::oracles

#endif
