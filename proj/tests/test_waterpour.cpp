#include <doctest.h>

#include <cmath>

#include "isiwtc/channel.hpp"
#include "isiwtc/errors.hpp"
#include "isiwtc/waterpour.hpp"

using namespace isiwtc;

TEST_CASE("folded_spectrum: flat filter, dicode DC null, EPR4 Nyquist null") {
  const SpectralSpec flat(TransferPolynomial({1.0}), 1.0, 1.0, 0.5);
  for (double f : {0.0, 0.1, 0.3, 0.5}) CHECK(folded_spectrum(flat, f) == doctest::Approx(1.0));
  CHECK(folded_spectrum(flat, 0.6) == 0.0);  // out of band

  const SpectralSpec dicode(normalize(TransferPolynomial::dicode()), 1.0, 1.0, 0.5);
  CHECK(folded_spectrum(dicode, 0.0) == doctest::Approx(0.0));
  CHECK(folded_spectrum(dicode, 0.5) == doctest::Approx(2.0));  // Nyquist peak

  const SpectralSpec epr4(normalize(TransferPolynomial::epr4()), 1.0, 1.0, 0.5);
  CHECK(folded_spectrum(epr4, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(folded_spectrum(epr4, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("waterpour: flat channel matches the closed form") {
  for (double es : {0.1, 1.0, 10.0}) {
    for (double w : {0.25, 0.5, 1.0}) {
      const double sigma2 = 0.7;
      const SpectralSpec spec(TransferPolynomial({1.0}), sigma2, es, w);
      const auto result = waterpour_capacity(spec);
      const double closed_form = w * std::log(1.0 + es / (2.0 * w * sigma2));
      CHECK(result.capacity == doctest::Approx(closed_form).epsilon(1e-6));
      CHECK(result.energy_residual <= 1e-9 * es);
    }
  }
}

TEST_CASE("waterpour: capacity vanishes with the input energy") {
  const SpectralSpec tiny(normalize(TransferPolynomial::dicode()), 0.5, 1e-9, 0.5);
  CHECK(waterpour_capacity(tiny).capacity < 1e-6);
}

TEST_CASE("waterpour: monotone in energy and in noise") {
  double previous = -1.0;
  for (double es : {0.5, 1.0, 2.0, 4.0}) {
    const SpectralSpec spec(normalize(TransferPolynomial::epr4()), 0.4, es, 0.5);
    const double c = waterpour_capacity(spec).capacity;
    CHECK(c > previous);
    previous = c;
  }
  previous = 1e9;
  for (double noise : {0.2, 0.4, 0.8, 1.6}) {
    const SpectralSpec spec(normalize(TransferPolynomial::epr4()), noise, 1.0, 0.5);
    const double c = waterpour_capacity(spec).capacity;
    CHECK(c < previous);
    previous = c;
  }
}

TEST_CASE("waterpour: dicode and EPR4 capacities cross for large bandwidth") {
  const double s2_bob = noise_variance_from_snr_db(1.0, 5.0);
  const double s2_eve = noise_variance_from_snr_db(1.0, 5.0);
  double c_bob_small = 0.0, c_eve_small = 0.0;
  for (double w : {0.25, 0.5}) {
    c_bob_small = waterpour_capacity(SpectralSpec(normalize(TransferPolynomial::dicode()), s2_bob, 1.0, w)).capacity;
    c_eve_small = waterpour_capacity(SpectralSpec(normalize(TransferPolynomial::epr4()), s2_eve, 1.0, w)).capacity;
  }
  // At small bandwidth Bob's dicode channel is ahead; for large enough
  // bandwidth Eve's EPR4 channel overtakes it.
  CHECK(c_bob_small > c_eve_small);
  for (double w : {4.0, 8.0}) {
    const double c_bob =
        waterpour_capacity(SpectralSpec(normalize(TransferPolynomial::dicode()), s2_bob, 1.0, w)).capacity;
    const double c_eve =
        waterpour_capacity(SpectralSpec(normalize(TransferPolynomial::epr4()), s2_eve, 1.0, w)).capacity;
    CHECK(c_eve > c_bob);
  }
}

TEST_CASE("gain_to_noise_ratio_curve: identical specs, and dicode vs EPR4 changes sign") {
  const SpectralSpec spec(normalize(TransferPolynomial::dicode()), 0.5, 1.0, 0.5);
  std::vector<double> grid;
  for (int k = 1; k <= 63; ++k) grid.push_back(0.5 * k / 64.0);
  const auto same = gain_to_noise_ratio_curve(spec, spec, grid);
  for (const auto& p : same) CHECK(p.bob_db == p.eve_db);

  const double s2 = noise_variance_from_snr_db(1.0, 5.0);
  const SpectralSpec bob(normalize(TransferPolynomial::dicode()), s2, 1.0, 0.5);
  const SpectralSpec eve(normalize(TransferPolynomial::epr4()), s2, 1.0, 0.5);
  const auto curve = gain_to_noise_ratio_curve(bob, eve, grid);
  bool bob_ahead = false, eve_ahead = false;
  for (const auto& p : curve) {
    bob_ahead |= p.bob_db > p.eve_db;
    eve_ahead |= p.eve_db > p.bob_db;
  }
  CHECK(bob_ahead);
  CHECK(eve_ahead);
}

TEST_CASE("gain_to_noise_ratio_curve: dicode falls to -inf at DC") {
  const SpectralSpec dicode(normalize(TransferPolynomial::dicode()), 0.5, 1.0, 0.5);
  const SpectralSpec flat(TransferPolynomial({1.0}), 0.5, 1.0, 0.5);
  const std::vector<double> grid{0.0, 1e-4, 1e-3, 1e-2};
  const auto curve = gain_to_noise_ratio_curve(dicode, flat, grid);
  CHECK(std::isinf(curve[0].bob_db));
  CHECK(curve[0].bob_db < 0.0);
  CHECK(curve[1].bob_db < curve[2].bob_db);
  CHECK(curve[2].bob_db < curve[3].bob_db);
  for (const auto& p : curve) CHECK(p.eve_db == doctest::Approx(10.0 * std::log10(2.0)));
}

TEST_CASE("spectral spec validation") {
  CHECK_THROWS_AS(SpectralSpec(TransferPolynomial({1.0}), 0.0, 1.0, 0.5), InvalidInputError);
  CHECK_THROWS_AS(SpectralSpec(TransferPolynomial({1.0}), 1.0, -1.0, 0.5), InvalidInputError);
  CHECK_THROWS_AS(SpectralSpec(TransferPolynomial({1.0}), 1.0, 1.0, 0.0), InvalidInputError);
}
