#ifndef ISIWTC_CHANNEL_HPP
#define ISIWTC_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "isiwtc/source_model.hpp"
#include "isiwtc/trellis.hpp"

namespace isiwtc {

/// Noisy observation sequences at Bob's and Eve's receivers.
struct ObservationPair {
  std::vector<double> bob;  // y_1 .. y_n
  std::vector<double> eve;  // z_1 .. z_n
  std::uint64_t bob_seed = 0;
  std::uint64_t eve_seed = 0;
};

/// Runs the sampled symbol path through both ISI+AWGN channels. The noise
/// streams come from two independently seeded generators, so either party's
/// observations are unchanged when only the other party's seed changes.
ObservationPair transmit(const SourceSample& sample, const IsiWtcSpec& spec,
                         const JointTrellis& trellis, std::uint64_t bob_seed,
                         std::uint64_t eve_seed);

/// SNR_dB = 10 log10(Es / sigma^2)  <=>  sigma^2 = Es 10^(-SNR_dB/10).
double noise_variance_from_snr_db(double es, double snr_db);

}  // namespace isiwtc

#endif
