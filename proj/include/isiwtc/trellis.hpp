#ifndef ISIWTC_TRELLIS_HPP
#define ISIWTC_TRELLIS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace isiwtc {

/// Finite channel input alphabet (real signal levels, e.g. +/- sqrt(Es)).
class Alphabet {
 public:
  /// Requires at least two distinct, finite symbol values.
  explicit Alphabet(std::vector<double> symbols);

  /// BPSK levels {+sqrt(es), -sqrt(es)}.
  static Alphabet bpsk(double es);

  std::size_t size() const { return symbols_.size(); }
  double symbol(std::size_t k) const { return symbols_[k]; }
  const std::vector<double>& symbols() const { return symbols_; }

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<double> symbols_;
};

/// Real ISI tap vector g_0..g_m. Trailing zero taps are trimmed at
/// construction, so memory() is the true filter degree.
class TransferPolynomial {
 public:
  explicit TransferPolynomial(std::vector<double> taps);

  static TransferPolynomial dicode() { return TransferPolynomial({1.0, -1.0}); }
  static TransferPolynomial epr4() { return TransferPolynomial({1.0, 1.0, -1.0, -1.0}); }

  std::size_t memory() const { return taps_.size() - 1; }
  const std::vector<double>& taps() const { return taps_; }
  double tap(std::size_t k) const { return taps_[k]; }

  /// Sum of squared taps.
  double energy() const;

  bool operator==(const TransferPolynomial& other) const { return taps_ == other.taps_; }

 private:
  std::vector<double> taps_;
};

/// Scales the taps to unit energy. Idempotent; rejects all-zero taps.
TransferPolynomial normalize(const TransferPolynomial& p);

/// Wiretap channel pair: Bob's and Eve's ISI filters and noise variances.
struct IsiWtcSpec {
  TransferPolynomial gb;
  TransferPolynomial ge;
  double sigma_b2 = 0.0;
  double sigma_e2 = 0.0;

  IsiWtcSpec(TransferPolynomial gb_, TransferPolynomial ge_, double sigma_b2_, double sigma_e2_);
};

struct TrellisEdge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::uint32_t symbol_index = 0;  // index of the newly emitted symbol
  double symbol = 0.0;             // its value
  double bob_output = 0.0;         // noiseless channel outputs on this edge
  double eve_output = 0.0;
};

/// Shared finite-state machine of the joint source/wiretap-channel model.
///
/// States are the nu most recent source symbols, indexed lexicographically
/// with the oldest symbol most significant. Edge k = i*|X| + symbol_index,
/// i.e. edges are grouped by origin state in state order.
class JointTrellis {
 public:
  JointTrellis(Alphabet alphabet, int nu, const IsiWtcSpec& spec);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_edges() const { return edges_.size(); }
  int nu() const { return nu_; }
  const Alphabet& alphabet() const { return alphabet_; }

  const TrellisEdge& edge(std::size_t k) const { return edges_[k]; }
  const std::vector<TrellisEdge>& edges() const { return edges_; }

  /// Outgoing / incoming edge indices of a state, in edge-index order.
  const std::vector<std::uint32_t>& outgoing(std::size_t state) const { return outgoing_[state]; }
  const std::vector<std::uint32_t>& incoming(std::size_t state) const { return incoming_[state]; }

  /// Edge index for the state pair (from, to), if (from, to) is in the edge set.
  std::optional<std::uint32_t> edge_index(std::uint32_t from, std::uint32_t to) const;

  /// Symbol indices of a state, oldest first.
  std::vector<std::uint32_t> state_tuple(std::uint32_t state) const;

 private:
  Alphabet alphabet_;
  int nu_;
  std::size_t num_states_;
  std::vector<TrellisEdge> edges_;
  std::vector<std::vector<std::uint32_t>> outgoing_;
  std::vector<std::vector<std::uint32_t>> incoming_;
};

using TrellisPtr = std::shared_ptr<const JointTrellis>;

/// Builds the joint trellis. Requires nu >= max(m_B, m_E) so that a state
/// carries every past symbol both filters need, and nu >= 1.
TrellisPtr build_joint_trellis(const Alphabet& alphabet, int nu, const IsiWtcSpec& spec);

}  // namespace isiwtc

#endif
