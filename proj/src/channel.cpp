#include "isiwtc/channel.hpp"

#include <cmath>

#include "isiwtc/errors.hpp"
#include "isiwtc/rng.hpp"

namespace isiwtc {

ObservationPair transmit(const SourceSample& sample, const IsiWtcSpec& spec,
                         const JointTrellis& trellis, std::uint64_t bob_seed,
                         std::uint64_t eve_seed) {
  const std::size_t n = sample.edge_indices.size();
  if (sample.states.size() != n + 1 || sample.symbols.size() != n)
    throw InvalidInputError("transmit: malformed sample");
  for (std::size_t t = 0; t < n; ++t) {
    const std::uint32_t k = sample.edge_indices[t];
    if (k >= trellis.num_edges() || trellis.edge(k).from != sample.states[t] ||
        trellis.edge(k).to != sample.states[t + 1])
      throw InvalidInputError("transmit: sample does not match trellis");
  }

  const double sd_b = std::sqrt(spec.sigma_b2);
  const double sd_e = std::sqrt(spec.sigma_e2);
  Rng rng_b(bob_seed);
  Rng rng_e(eve_seed);

  ObservationPair obs;
  obs.bob_seed = bob_seed;
  obs.eve_seed = eve_seed;
  obs.bob.resize(n);
  obs.eve.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& e = trellis.edge(sample.edge_indices[t]);
    obs.bob[t] = e.bob_output + sd_b * rng_b.gaussian();
    obs.eve[t] = e.eve_output + sd_e * rng_e.gaussian();
  }
  return obs;
}

double noise_variance_from_snr_db(double es, double snr_db) {
  if (!(es > 0.0)) throw InvalidInputError("symbol energy must be positive");
  return es * std::pow(10.0, -snr_db / 10.0);
}

}  // namespace isiwtc
