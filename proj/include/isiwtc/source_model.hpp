#ifndef ISIWTC_SOURCE_MODEL_HPP
#define ISIWTC_SOURCE_MODEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isiwtc/trellis.hpp"

namespace isiwtc {

/// Joint stationary edge distribution Q on the trellis edge set, with the
/// derived per-state mass mu_i = sum_j Q_ij and transitions p_ij = Q_ij/mu_i.
///
/// Construction does not enforce feasibility -- validate() reports it -- so
/// diagnostic call sites can hold intentionally broken distributions.
class EdgeDistribution {
 public:
  EdgeDistribution(TrellisPtr trellis, std::vector<double> edge_mass);

  /// Independent uniformly distributed symbols: p_ij = 1/|X| on every edge.
  static EdgeDistribution iud(TrellisPtr trellis);

  const TrellisPtr& trellis() const { return trellis_; }
  const std::vector<double>& edge_mass() const { return q_; }      // Q_ij
  const std::vector<double>& stationary() const { return mu_; }    // mu_i
  const std::vector<double>& transition() const { return p_; }     // p_ij

  /// New distribution with transitions clipped to at least `floor` and rows
  /// renormalized; keeps every iterate strictly inside the polytope.
  EdgeDistribution floored(double floor) const;

 private:
  TrellisPtr trellis_;
  std::vector<double> q_;
  std::vector<double> mu_;
  std::vector<double> p_;
};

/// Builds the stationary edge distribution Q_ij = mu_i p_ij from per-edge
/// transition probabilities. Rows must sum to 1 (within 1e-9) and the support
/// graph must be strongly connected; mu is the unique stationary distribution,
/// found by a direct linear solve.
EdgeDistribution from_transitions(TrellisPtr trellis, std::span<const double> transition);

/// Feasibility diagnostics for a candidate Q.
struct FeasibilityReport {
  bool feasible = false;
  double worst_negativity = 0.0;      // most negative Q_ij (0 if none)
  double normalization_residual = 0.0;  // |sum Q - 1|
  double worst_flow_residual = 0.0;   // max_i |outflow_i - inflow_i|
  std::vector<std::string> violations;
};

FeasibilityReport validate(const EdgeDistribution& q);

/// Feasibility tolerances from the polytope definition.
inline constexpr double kFeasibilityTol = 1e-10;

/// `count` strictly interior starting points for the optimizer, driven by a
/// Weyl sequence with increments frac(sqrt(prime_d)) over the first |B| primes.
/// Each point maps per-state coordinate groups to a transition row by an
/// offset-and-normalize step, then runs from_transitions.
std::vector<EdgeDistribution> weyl_initializations(TrellisPtr trellis, std::size_t count,
                                                   std::uint64_t seed);

/// One sampled state/symbol path of the source.
struct SourceSample {
  std::vector<std::uint32_t> states;        // S_0 .. S_n
  std::vector<std::uint32_t> edge_indices;  // edge at each step, length n
  std::vector<double> symbols;              // x_1 .. x_n
  std::uint64_t seed = 0;
};

/// Draws S_0 from mu and walks the chain for n steps. Reproducible per seed.
SourceSample sample_sequence(const EdgeDistribution& q, std::size_t n, std::uint64_t seed);

/// Text document with trellis metadata and per-edge (i, j, Q_ij) triples;
/// round-trips doubles exactly (17 significant digits).
std::string to_document(const EdgeDistribution& q);
EdgeDistribution edge_distribution_from_document(TrellisPtr trellis, const std::string& doc);

}  // namespace isiwtc

#endif
