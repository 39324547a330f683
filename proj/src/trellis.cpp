#include "isiwtc/trellis.hpp"

#include <cmath>
#include <set>
#include <string>

#include "isiwtc/errors.hpp"

namespace isiwtc {

Alphabet::Alphabet(std::vector<double> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) throw InvalidInputError("alphabet needs at least 2 symbols");
  std::set<double> distinct;
  for (double s : symbols_) {
    if (!std::isfinite(s)) throw InvalidInputError("alphabet symbols must be finite");
    if (!distinct.insert(s).second) throw InvalidInputError("alphabet symbols must be distinct");
  }
}

Alphabet Alphabet::bpsk(double es) {
  if (!(es > 0.0)) throw InvalidInputError("symbol energy must be positive");
  const double a = std::sqrt(es);
  return Alphabet({+a, -a});
}

TransferPolynomial::TransferPolynomial(std::vector<double> taps) : taps_(std::move(taps)) {
  if (taps_.empty()) throw InvalidInputError("transfer polynomial needs at least one tap");
  for (double t : taps_)
    if (!std::isfinite(t)) throw InvalidInputError("transfer polynomial taps must be finite");
  while (taps_.size() > 1 && taps_.back() == 0.0) taps_.pop_back();
}

double TransferPolynomial::energy() const {
  double e = 0.0;
  for (double t : taps_) e += t * t;
  return e;
}

TransferPolynomial normalize(const TransferPolynomial& p) {
  const double e = p.energy();
  if (e == 0.0) throw InvalidInputError("cannot normalize all-zero transfer polynomial");
  const double s = 1.0 / std::sqrt(e);
  std::vector<double> taps = p.taps();
  for (double& t : taps) t *= s;
  return TransferPolynomial(std::move(taps));
}

IsiWtcSpec::IsiWtcSpec(TransferPolynomial gb_, TransferPolynomial ge_, double sigma_b2_, double sigma_e2_)
    : gb(std::move(gb_)), ge(std::move(ge_)), sigma_b2(sigma_b2_), sigma_e2(sigma_e2_) {
  // Zero is allowed so the noiseless limit can be exercised directly; the
  // smoother and the config layer demand strictly positive variances.
  if (sigma_b2 < 0.0 || sigma_e2 < 0.0) throw InvalidInputError("noise variances must be non-negative");
}

namespace {

// Filter output sum g_l * x_{t-l} for the symbol window x_{t-nu} .. x_t.
double filter_output(const TransferPolynomial& g, const std::vector<double>& window) {
  double u = 0.0;
  const std::size_t last = window.size() - 1;  // position of x_t
  for (std::size_t l = 0; l < g.taps().size(); ++l) u += g.tap(l) * window[last - l];
  return u;
}

}  // namespace

JointTrellis::JointTrellis(Alphabet alphabet, int nu, const IsiWtcSpec& spec)
    : alphabet_(std::move(alphabet)), nu_(nu) {
  const std::size_t a = alphabet_.size();
  const int max_memory = static_cast<int>(std::max(spec.gb.memory(), spec.ge.memory()));
  if (nu_ < 1) throw InvalidInputError("source memory nu must be at least 1");
  if (nu_ < max_memory)
    throw InvalidInputError("memory too small: nu = " + std::to_string(nu_) +
                            " < max channel memory " + std::to_string(max_memory));

  num_states_ = 1;
  for (int k = 0; k < nu_; ++k) {
    if (num_states_ > (1u << 24) / a) throw InvalidInputError("state space too large");
    num_states_ *= a;
  }

  outgoing_.assign(num_states_, {});
  incoming_.assign(num_states_, {});
  edges_.reserve(num_states_ * a);

  const std::size_t tail = num_states_ / a;  // |X|^(nu-1)
  for (std::uint32_t i = 0; i < num_states_; ++i) {
    const auto tuple = state_tuple(i);
    for (std::uint32_t s = 0; s < a; ++s) {
      const std::uint32_t j = static_cast<std::uint32_t>((i % tail) * a + s);
      // Window x_{t-nu} .. x_t: the origin state's nu symbols plus the new one.
      std::vector<double> window(nu_ + 1);
      for (int k = 0; k < nu_; ++k) window[k] = alphabet_.symbol(tuple[k]);
      window[nu_] = alphabet_.symbol(s);
      TrellisEdge e;
      e.from = i;
      e.to = j;
      e.symbol_index = s;
      e.symbol = alphabet_.symbol(s);
      e.bob_output = filter_output(spec.gb, window);
      e.eve_output = filter_output(spec.ge, window);
      const auto idx = static_cast<std::uint32_t>(edges_.size());
      edges_.push_back(e);
      outgoing_[i].push_back(idx);
      incoming_[j].push_back(idx);
    }
  }
}

std::optional<std::uint32_t> JointTrellis::edge_index(std::uint32_t from, std::uint32_t to) const {
  const std::size_t a = alphabet_.size();
  const std::size_t tail = num_states_ / a;
  if (from >= num_states_ || to >= num_states_) return std::nullopt;
  if (to / a != from % tail) return std::nullopt;  // shift consistency
  return static_cast<std::uint32_t>(from * a + to % a);
}

std::vector<std::uint32_t> JointTrellis::state_tuple(std::uint32_t state) const {
  const std::size_t a = alphabet_.size();
  std::vector<std::uint32_t> tuple(nu_);
  std::uint32_t v = state;
  for (int k = nu_ - 1; k >= 0; --k) {
    tuple[k] = v % a;
    v /= a;
  }
  return tuple;
}

TrellisPtr build_joint_trellis(const Alphabet& alphabet, int nu, const IsiWtcSpec& spec) {
  return std::make_shared<const JointTrellis>(alphabet, nu, spec);
}

}  // namespace isiwtc
