#ifndef ISIWTC_WATERPOUR_HPP
#define ISIWTC_WATERPOUR_HPP

#include <span>
#include <vector>

#include "isiwtc/trellis.hpp"

namespace isiwtc {

/// Continuous-time reading of an ISI channel for the water-pouring capacity:
/// filter taps, flat noise power spectral density (W/Hz), average symbol
/// energy (J), and receiver lowpass bandwidth W (Hz) with T = 1/(2W).
struct SpectralSpec {
  TransferPolynomial g;
  double noise_psd = 0.0;
  double es = 1.0;
  double bandwidth = 0.5;

  SpectralSpec(TransferPolynomial g_, double noise_psd_, double es_, double bandwidth_);

  double symbol_period() const { return 1.0 / (2.0 * bandwidth); }
};

/// Folded power spectrum |G(f)|^2 with G(f) = sum_l g_l e^{-j 2 pi l f T} / sum_l |g_l|^2
/// inside the band and 0 for |f| > W.
double folded_spectrum(const SpectralSpec& spec, double f);

struct WaterpourResult {
  double capacity = 0.0;         // nats per second
  double water_level = 0.0;      // the constant alpha
  double energy_residual = 0.0;  // |integral - Es| at the returned alpha
};

/// Average-energy-constrained capacity: bisects the water level until the
/// poured energy matches Es (relative tolerance 1e-12), then integrates the
/// rate density. Both integrals use adaptive Simpson refinement, which keeps
/// subdividing around the max{0, .} kinks and the spectral nulls.
WaterpourResult waterpour_capacity(const SpectralSpec& spec);

struct GainToNoisePoint {
  double f = 0.0;
  double bob_db = 0.0;
  double eve_db = 0.0;
};

/// Gain-to-noise spectrum ratios |G(f)|^2 / N(f) in dB for both parties on a
/// shared frequency grid inside [0, W]. Spectral nulls map to -inf dB.
std::vector<GainToNoisePoint> gain_to_noise_ratio_curve(const SpectralSpec& bob,
                                                        const SpectralSpec& eve,
                                                        std::span<const double> grid);

}  // namespace isiwtc

#endif
