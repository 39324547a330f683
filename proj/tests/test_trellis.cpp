#include <doctest.h>

#include <cmath>
#include <set>

#include "isiwtc/errors.hpp"
#include "isiwtc/trellis.hpp"

using namespace isiwtc;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("normalize: dicode and EPR4 hit the reference taps") {
  const auto dicode = normalize(TransferPolynomial::dicode());
  REQUIRE(dicode.taps().size() == 2);
  CHECK(dicode.tap(0) == doctest::Approx(kInvSqrt2).epsilon(1e-15));
  CHECK(dicode.tap(1) == doctest::Approx(-kInvSqrt2).epsilon(1e-15));

  const auto epr4 = normalize(TransferPolynomial::epr4());
  REQUIRE(epr4.taps().size() == 4);
  CHECK(epr4.tap(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(epr4.tap(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(epr4.tap(2) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(epr4.tap(3) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("normalize: unit-energy taps are unchanged and the map is idempotent") {
  const TransferPolynomial p({0.6, 0.8});
  const auto q = normalize(p);
  CHECK(q.tap(0) == 0.6);
  CHECK(q.tap(1) == 0.8);
  const auto r = normalize(normalize(TransferPolynomial({3.0, -4.0})));
  CHECK(r.energy() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(normalize(TransferPolynomial({0.0})), InvalidInputError);
}

TEST_CASE("transfer polynomial trims trailing zeros") {
  const TransferPolynomial p({1.0, -1.0, 0.0, 0.0});
  CHECK(p.memory() == 1);
  const TransferPolynomial z({0.0});
  CHECK(z.memory() == 0);
}

TEST_CASE("joint trellis: third-order binary source with dicode and EPR4 (8 states, 16 edges)") {
  const IsiWtcSpec spec(normalize(TransferPolynomial::dicode()), normalize(TransferPolynomial::epr4()),
                        0.5, 0.5);
  const auto trellis = build_joint_trellis(Alphabet::bpsk(1.0), 3, spec);
  CHECK(trellis->num_states() == 8);
  CHECK(trellis->num_edges() == 16);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(trellis->outgoing(i).size() == 2);
    CHECK(trellis->incoming(i).size() == 2);
  }
}

TEST_CASE("joint trellis: unnormalized dicode outputs are {0, +2, -2}") {
  const IsiWtcSpec spec(TransferPolynomial::dicode(), TransferPolynomial({1.0}), 1.0, 1.0);
  const auto trellis = build_joint_trellis(Alphabet({+1.0, -1.0}), 1, spec);
  std::set<double> outputs;
  for (const auto& e : trellis->edges()) outputs.insert(e.bob_output);
  CHECK(outputs == std::set<double>{-2.0, 0.0, 2.0});
}

TEST_CASE("joint trellis: memoryless filter reproduces the edge symbol") {
  const IsiWtcSpec spec(TransferPolynomial({1.0}), TransferPolynomial({1.0}), 1.0, 1.0);
  const auto trellis = build_joint_trellis(Alphabet({+1.0, -1.0}), 1, spec);
  for (const auto& e : trellis->edges()) CHECK(e.bob_output == e.symbol);

  // Single-tap gain g0: output is g0 times the edge symbol.
  const IsiWtcSpec scaled(TransferPolynomial({0.7}), TransferPolynomial({1.0}), 1.0, 1.0);
  const auto trellis2 = build_joint_trellis(Alphabet({+1.0, -1.0}), 1, scaled);
  for (const auto& e : trellis2->edges()) CHECK(e.bob_output == doctest::Approx(0.7 * e.symbol));
}

TEST_CASE("joint trellis: succ/pred round trip and shift consistency") {
  const IsiWtcSpec spec(normalize(TransferPolynomial::dicode()), normalize(TransferPolynomial::epr4()),
                        0.5, 0.5);
  const auto trellis = build_joint_trellis(Alphabet::bpsk(1.0), 3, spec);
  for (std::size_t i = 0; i < trellis->num_states(); ++i) {
    for (std::uint32_t k : trellis->outgoing(i)) {
      const auto& e = trellis->edge(k);
      CHECK(e.from == i);
      // Round trip: the edge appears among its head state's incoming edges.
      const auto& incoming = trellis->incoming(e.to);
      CHECK(std::find(incoming.begin(), incoming.end(), k) != incoming.end());
      // Shift consistency of the state tuples.
      const auto ti = trellis->state_tuple(e.from);
      const auto tj = trellis->state_tuple(e.to);
      for (int s = 0; s + 1 < trellis->nu(); ++s) CHECK(ti[s + 1] == tj[s]);
      CHECK(tj.back() == e.symbol_index);
      CHECK(trellis->edge_index(e.from, e.to) == k);
    }
  }
  CHECK_FALSE(trellis->edge_index(0, 5).has_value());  // 000 -> 101 breaks the shift rule
}

TEST_CASE("joint trellis: construction is deterministic") {
  const IsiWtcSpec spec(normalize(TransferPolynomial::dicode()), normalize(TransferPolynomial::epr4()),
                        0.5, 0.5);
  const auto a = build_joint_trellis(Alphabet::bpsk(1.0), 3, spec);
  const auto b = build_joint_trellis(Alphabet::bpsk(1.0), 3, spec);
  REQUIRE(a->num_edges() == b->num_edges());
  for (std::size_t k = 0; k < a->num_edges(); ++k) {
    CHECK(a->edge(k).from == b->edge(k).from);
    CHECK(a->edge(k).to == b->edge(k).to);
    CHECK(a->edge(k).bob_output == b->edge(k).bob_output);
    CHECK(a->edge(k).eve_output == b->edge(k).eve_output);
  }
}

TEST_CASE("joint trellis: rejects memory smaller than the channel needs") {
  const IsiWtcSpec spec(normalize(TransferPolynomial::dicode()), normalize(TransferPolynomial::epr4()),
                        0.5, 0.5);
  CHECK_THROWS_WITH_AS(static_cast<void>(build_joint_trellis(Alphabet::bpsk(1.0), 2, spec)),
                       doctest::Contains("memory too small"), InvalidInputError);
  CHECK_THROWS_AS(static_cast<void>(build_joint_trellis(Alphabet::bpsk(1.0), 0, spec)),
                  InvalidInputError);
}

TEST_CASE("alphabet validation") {
  CHECK_THROWS_AS(Alphabet({1.0}), InvalidInputError);
  CHECK_THROWS_AS(Alphabet({1.0, 1.0}), InvalidInputError);
  CHECK_THROWS_AS(Alphabet({1.0, std::nan("")}), InvalidInputError);
}
