#include <doctest.h>

#include <cmath>

#include "isiwtc/channel.hpp"
#include "isiwtc/errors.hpp"
#include "isiwtc/rate_estimator.hpp"
#include "oracles.hpp"

using namespace isiwtc;

namespace {

TrellisPtr dicode_epr4_trellis(double es = 1.0) {
  const IsiWtcSpec spec(normalize(TransferPolynomial::dicode()), normalize(TransferPolynomial::epr4()),
                        1.0, 1.0);
  return build_joint_trellis(Alphabet::bpsk(es), 3, spec);
}

IsiWtcSpec dicode_epr4_spec(double snrb_db, double snre_db, double es = 1.0) {
  return IsiWtcSpec(normalize(TransferPolynomial::dicode()), normalize(TransferPolynomial::epr4()),
                    noise_variance_from_snr_db(es, snrb_db), noise_variance_from_snr_db(es, snre_db));
}

}  // namespace

TEST_CASE("t_statistics: uninformative observations give log p_ij") {
  const auto trellis = dicode_epr4_trellis();
  const auto q = weyl_initializations(trellis, 1, 3).front();
  const IsiWtcSpec spec(normalize(TransferPolynomial::dicode()), normalize(TransferPolynomial::epr4()),
                        1e6, 1e6);
  const auto sample = sample_sequence(q, 2000, 8);
  const auto obs = transmit(sample, spec, *trellis, 9, 10);
  const auto tables = smooth(q, obs.bob, spec.sigma_b2, Party::bob);
  const auto t_values = t_statistics(q, tables);
  double weighted = 0.0;
  for (std::size_t k = 0; k < t_values.size(); ++k) {
    CHECK(t_values[k] == doctest::Approx(std::log(q.transition()[k])).epsilon(1e-3));
    weighted += q.edge_mass()[k] * t_values[k];
  }
  // The weighted sum approaches -H(S_t | S_{t-1}).
  double entropy = 0.0;
  for (std::size_t k = 0; k < t_values.size(); ++k)
    entropy -= q.edge_mass()[k] * std::log(q.transition()[k]);
  CHECK(weighted == doctest::Approx(-entropy).epsilon(1e-3));
}

TEST_CASE("t_statistics: deterministic cycle with noiseless observations gives zero") {
  const IsiWtcSpec channels(normalize(TransferPolynomial::dicode()), TransferPolynomial({1.0}), 0.0,
                            0.0);
  const auto trellis = build_joint_trellis(Alphabet({+1.0, -1.0}), 1, channels);
  const EdgeDistribution q(trellis, {0.0, 0.5, 0.5, 0.0});
  const auto sample = sample_sequence(q, 64, 4);
  const auto obs = transmit(sample, channels, *trellis, 5, 6);
  const auto tables = smooth(q, obs.bob, 1e-4, Party::bob);
  const auto t_values = t_statistics(q, tables);
  CHECK(t_values[*trellis->edge_index(0, 1)] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(t_values[*trellis->edge_index(1, 0)] == doctest::Approx(0.0).epsilon(1e-9));
  // Unvisited edges have zero prior mass and zero posterior mass.
  CHECK(t_values[*trellis->edge_index(0, 0)] == 0.0);
  CHECK(t_values[*trellis->edge_index(1, 1)] == 0.0);
}

TEST_CASE("t_statistics: matches the literal formula on brute-force posteriors") {
  const IsiWtcSpec channels(normalize(TransferPolynomial::dicode()), TransferPolynomial({1.0}), 0.9,
                            1.1);
  const auto trellis = build_joint_trellis(Alphabet({+1.0, -1.0}), 1, channels);
  const auto q = from_transitions(trellis, std::vector<double>{0.55, 0.45, 0.25, 0.75});
  const std::vector<double> obs{0.4, -1.3, 0.8, 0.1, -0.9, 1.6};
  const auto fast_tables = smooth(q, obs, channels.sigma_b2, Party::bob);
  const auto fast_t = t_statistics(q, fast_tables);
  const auto oracle_tables = oracles::brute_force_posteriors(q, obs, channels.sigma_b2, Party::bob);
  const auto oracle_t = oracles::t_from_posteriors(q, oracle_tables);
  for (std::size_t k = 0; k < fast_t.size(); ++k)
    CHECK(fast_t[k] == doctest::Approx(oracle_t[k]).epsilon(1e-10));
}

TEST_CASE("estimate: identical channels and noise force a zero secure rate") {
  const auto gb = normalize(TransferPolynomial::dicode());
  const IsiWtcSpec spec(gb, gb, noise_variance_from_snr_db(1.0, 5.0),
                        noise_variance_from_snr_db(1.0, 5.0));
  const auto trellis = build_joint_trellis(Alphabet::bpsk(1.0), 3, spec);
  const auto q = EdgeDistribution::iud(trellis);
  const auto stats = estimate_secure_rate(q, spec, 100000, SeedBundle::derive(5));
  CHECK(std::abs(stats.rate_estimate) <= 3.0 * stats.block_se);
}

TEST_CASE("estimate: blind Eve reduces to Bob's term plus the source entropy rate") {
  const auto trellis = dicode_epr4_trellis();
  const auto q = EdgeDistribution::iud(trellis);
  IsiWtcSpec spec = dicode_epr4_spec(5.0, 5.0);
  const IsiWtcSpec blind(spec.gb, spec.ge, spec.sigma_b2, 1e6);
  const auto stats = estimate_secure_rate(q, blind, 50000, SeedBundle::derive(6));
  // T^E degenerates to log p, so the Eve term becomes -H(S_t | S_{t-1}).
  double entropy = 0.0;
  for (std::size_t k = 0; k < q.edge_mass().size(); ++k)
    entropy -= q.edge_mass()[k] * std::log(q.transition()[k]);
  CHECK(stats.eve_term == doctest::Approx(-entropy).epsilon(2e-3));
  CHECK(stats.rate_estimate == doctest::Approx(stats.bob_term + entropy).epsilon(2e-3));
}

TEST_CASE("estimate: entropy-difference identity is an exact rearrangement") {
  const auto trellis = dicode_epr4_trellis();
  const auto q = weyl_initializations(trellis, 1, 11).front();
  const IsiWtcSpec spec = dicode_epr4_spec(5.0, 5.0);
  const std::size_t n = 1000;
  const auto sample = sample_sequence(q, n, 12);
  const auto obs = transmit(sample, spec, *trellis, 13, 14);
  const auto tables = smooth(q, obs.bob, spec.sigma_b2, Party::bob);
  const auto t_values = t_statistics(q, tables);

  double weighted = 0.0;
  for (std::size_t k = 0; k < t_values.size(); ++k) weighted += q.edge_mass()[k] * t_values[k];

  // Same posterior tables, no per-edge division: difference of the posterior
  // single-state and pairwise entropies.
  double other_route = 0.0;
  for (std::size_t t = 1; t <= n; ++t) {
    double h_single = 0.0, h_pair = 0.0;
    for (std::size_t i = 0; i < tables.num_states; ++i) {
      const double v = tables.single_at(t, i);
      if (v > 0.0) h_single -= v * std::log(v);
    }
    for (std::size_t k = 0; k < tables.num_edges; ++k) {
      const double v = tables.pairwise_at(t, k);
      if (v > 0.0) h_pair -= v * std::log(v);
    }
    other_route += h_single - h_pair;
  }
  other_route /= static_cast<double>(n);
  CHECK(weighted == doctest::Approx(other_route).epsilon(1e-12));
}

TEST_CASE("estimate: more noise at Eve never hurts the rate") {
  const auto trellis = dicode_epr4_trellis();
  const auto q = EdgeDistribution::iud(trellis);
  const IsiWtcSpec base = dicode_epr4_spec(5.0, 5.0);
  double previous = -1e9;
  for (double scale : {1.0, 4.0, 16.0, 64.0}) {
    const IsiWtcSpec spec(base.gb, base.ge, base.sigma_b2, base.sigma_e2 * scale);
    const auto stats = estimate_secure_rate(q, spec, 50000, SeedBundle::derive(77));
    CHECK(stats.rate_estimate > previous - 3.0 * stats.block_se);
    previous = stats.rate_estimate;
  }
}

TEST_CASE("estimate: two independent seeds stay within the stability budget") {
  const auto trellis = dicode_epr4_trellis();
  const auto q = EdgeDistribution::iud(trellis);
  const IsiWtcSpec spec = dicode_epr4_spec(5.0, 5.0);
  const auto a = estimate_secure_rate(q, spec, 100000, SeedBundle::derive(1001));
  const auto b = estimate_secure_rate(q, spec, 100000, SeedBundle::derive(2002));
  CHECK(std::abs(a.rate_estimate - b.rate_estimate) < 5e-3);
  CHECK(a.rate_estimate == doctest::Approx(a.bob_term - a.eve_term).epsilon(1e-15));
}

TEST_CASE("estimate: seeds are recorded and rates reproduce") {
  const auto trellis = dicode_epr4_trellis();
  const auto q = EdgeDistribution::iud(trellis);
  const IsiWtcSpec spec = dicode_epr4_spec(4.0, 5.0);
  const auto seeds = SeedBundle::derive(31);
  const auto a = estimate_secure_rate(q, spec, 20000, seeds);
  const auto b = estimate_secure_rate(q, spec, 20000, seeds);
  CHECK(a.rate_estimate == b.rate_estimate);
  CHECK(a.seeds.source == seeds.source);
  CHECK(a.seeds.bob == seeds.bob);
  CHECK(a.seeds.eve == seeds.eve);
}

TEST_CASE("t_statistics: mismatched tables are rejected") {
  const auto trellis = dicode_epr4_trellis();
  const auto q = EdgeDistribution::iud(trellis);
  PosteriorTables tables;
  tables.n = 4;
  tables.num_states = 2;
  tables.num_edges = 4;
  tables.single.assign(8, 0.5);
  tables.pairwise.assign(16, 0.25);
  CHECK_THROWS_AS(t_statistics(q, tables), InvalidInputError);
}
