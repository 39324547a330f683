#include "isiwtc/waterpour.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "isiwtc/errors.hpp"

namespace isiwtc {

SpectralSpec::SpectralSpec(TransferPolynomial g_, double noise_psd_, double es_, double bandwidth_)
    : g(std::move(g_)), noise_psd(noise_psd_), es(es_), bandwidth(bandwidth_) {
  if (!(noise_psd > 0.0)) throw InvalidInputError("noise PSD must be positive");
  if (!(es > 0.0)) throw InvalidInputError("symbol energy must be positive");
  if (!(bandwidth > 0.0)) throw InvalidInputError("bandwidth must be positive");
}

double folded_spectrum(const SpectralSpec& spec, double f) {
  if (std::abs(f) > spec.bandwidth) return 0.0;
  const double t = spec.symbol_period();
  double re = 0.0, im = 0.0;
  for (std::size_t l = 0; l < spec.g.taps().size(); ++l) {
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(l) * f * t;
    re += spec.g.tap(l) * std::cos(phase);
    im += spec.g.tap(l) * std::sin(phase);
  }
  const double denom = spec.g.energy();
  if (denom == 0.0) throw InvalidInputError("no water: all-null spectrum");
  return (re * re + im * im) / (denom * denom);
}

namespace {

// Adaptive Simpson on [a, b]; recursion splits until the local error estimate
// is below tol, with a depth cap to contain the max{0,.} kinks.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  // Seed the recursion with a fixed partition so narrow features near the
  // nulls are not missed by the first Simpson estimate.
  const int segments = 64;
  double total = 0.0;
  const double h = (b - a) / segments;
  for (int s = 0; s < segments; ++s) {
    const double lo = a + s * h, hi = lo + h;
    const double fm = f(0.5 * (lo + hi));
    const double flo = f(lo), fhi = f(hi);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += adaptive_simpson(f, lo, hi, flo, fm, fhi, whole, tol / segments, 48);
  }
  return total;
}

}  // namespace

WaterpourResult waterpour_capacity(const SpectralSpec& spec) {
  const double w = spec.bandwidth;
  if (spec.g.energy() == 0.0) throw InvalidInputError("no water: all-null spectrum");

  // |G|^2 is even in f, so both integrals run over [0, W] and double.
  const auto poured_energy = [&](double alpha) {
    const auto integrand = [&](double f) {
      const double g2 = folded_spectrum(spec, f);
      if (!(g2 > 0.0)) return 0.0;
      return std::max(0.0, alpha - spec.noise_psd / g2);
    };
    return 2.0 * integrate(integrand, 0.0, w, 1e-13 * std::max(1.0, spec.es));
  };

  double lo = 0.0;
  double hi = spec.noise_psd + spec.es;  // generous start for the doubling search
  int guard = 0;
  while (poured_energy(hi) < spec.es) {
    hi *= 2.0;
    if (++guard > 200) throw InvalidInputError("no water: energy cannot be placed");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (poured_energy(mid) < spec.es)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) <= 1e-15 * hi) break;
  }
  const double alpha = 0.5 * (lo + hi);
  const double residual = std::abs(poured_energy(alpha) - spec.es);

  const auto rate_density = [&](double f) {
    const double g2 = folded_spectrum(spec, f);
    if (!(g2 > 0.0)) return 0.0;
    const double arg = alpha * g2 / spec.noise_psd;
    return arg > 1.0 ? std::log(arg) : 0.0;
  };
  const double capacity = integrate(rate_density, 0.0, w, 1e-11);

  return WaterpourResult{capacity, alpha, residual};
}

std::vector<GainToNoisePoint> gain_to_noise_ratio_curve(const SpectralSpec& bob,
                                                        const SpectralSpec& eve,
                                                        std::span<const double> grid) {
  std::vector<GainToNoisePoint> points;
  points.reserve(grid.size());
  for (double f : grid) {
    GainToNoisePoint p;
    p.f = f;
    p.bob_db = 10.0 * std::log10(folded_spectrum(bob, f) / bob.noise_psd);
    p.eve_db = 10.0 * std::log10(folded_spectrum(eve, f) / eve.noise_psd);
    points.push_back(p);
  }
  return points;
}

}  // namespace isiwtc
