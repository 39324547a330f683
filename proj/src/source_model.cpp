#include "isiwtc/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>

#include "isiwtc/errors.hpp"
#include "isiwtc/linalg.hpp"
#include "isiwtc/rng.hpp"

namespace isiwtc {

namespace {

// Strong connectivity of the support graph {edges with weight > 0}: forward
// and backward reachability from state 0.
bool strongly_connected(const JointTrellis& trellis, std::span<const double> weight) {
  const std::size_t s = trellis.num_states();
  for (int backward = 0; backward < 2; ++backward) {
    std::vector<bool> seen(s, false);
    std::deque<std::uint32_t> queue{0};
    seen[0] = true;
    std::size_t found = 1;
    while (!queue.empty()) {
      const std::uint32_t v = queue.front();
      queue.pop_front();
      const auto& adj = backward ? trellis.incoming(v) : trellis.outgoing(v);
      for (std::uint32_t k : adj) {
        if (!(weight[k] > 0.0)) continue;
        const std::uint32_t w = backward ? trellis.edge(k).from : trellis.edge(k).to;
        if (!seen[w]) {
          seen[w] = true;
          ++found;
          queue.push_back(w);
        }
      }
    }
    if (found != s) return false;
  }
  return true;
}

std::vector<double> stationary_distribution(const JointTrellis& trellis,
                                            std::span<const double> transition) {
  const std::size_t s = trellis.num_states();
  // mu (P - I) = 0 transposed into (P^T - I) mu = 0, with the last
  // stationarity equation replaced by the normalization row.
  Matrix m(s, s);
  std::vector<double> b(s, 0.0);
  for (std::size_t k = 0; k < trellis.num_edges(); ++k) {
    const auto& e = trellis.edge(k);
    m(e.to, e.from) += transition[k];
  }
  for (std::size_t i = 0; i < s; ++i) m(i, i) -= 1.0;
  for (std::size_t c = 0; c < s; ++c) m(s - 1, c) = 1.0;
  b[s - 1] = 1.0;
  return solve_square(std::move(m), std::move(b));
}

}  // namespace

EdgeDistribution::EdgeDistribution(TrellisPtr trellis, std::vector<double> edge_mass)
    : trellis_(std::move(trellis)), q_(std::move(edge_mass)) {
  if (!trellis_) throw InvalidInputError("edge distribution needs a trellis");
  if (q_.size() != trellis_->num_edges())
    throw InvalidInputError("edge mass vector size does not match trellis edge count");
  const std::size_t s = trellis_->num_states();
  mu_.assign(s, 0.0);
  for (std::size_t k = 0; k < q_.size(); ++k) mu_[trellis_->edge(k).from] += q_[k];
  p_.assign(q_.size(), 0.0);
  for (std::size_t k = 0; k < q_.size(); ++k) {
    const double m = mu_[trellis_->edge(k).from];
    p_[k] = m > 0.0 ? q_[k] / m : 0.0;
  }
}

EdgeDistribution EdgeDistribution::iud(TrellisPtr trellis) {
  std::vector<double> p(trellis->num_edges(), 1.0 / static_cast<double>(trellis->alphabet().size()));
  return from_transitions(std::move(trellis), p);
}

EdgeDistribution EdgeDistribution::floored(double floor) const {
  std::vector<double> p = p_;
  for (double& v : p) v = std::max(v, floor);
  for (std::size_t i = 0; i < trellis_->num_states(); ++i) {
    double row = 0.0;
    for (std::uint32_t k : trellis_->outgoing(i)) row += p[k];
    for (std::uint32_t k : trellis_->outgoing(i)) p[k] /= row;
  }
  return from_transitions(trellis_, p);
}

EdgeDistribution from_transitions(TrellisPtr trellis, std::span<const double> transition) {
  if (transition.size() != trellis->num_edges())
    throw InvalidInputError("transition vector size does not match trellis edge count");
  for (std::size_t i = 0; i < trellis->num_states(); ++i) {
    double row = 0.0;
    for (std::uint32_t k : trellis->outgoing(i)) {
      if (transition[k] < 0.0) throw InvalidInputError("invalid rows: negative transition probability");
      row += transition[k];
    }
    if (std::abs(row - 1.0) > 1e-9)
      throw InvalidInputError("invalid rows: transition row of state " + std::to_string(i) +
                              " sums to " + std::to_string(row));
  }
  if (!strongly_connected(*trellis, transition))
    throw InvalidInputError("not irreducible: transition support graph is not strongly connected");

  const auto mu = stationary_distribution(*trellis, transition);
  std::vector<double> q(trellis->num_edges());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = mu[trellis->edge(k).from] * transition[k];
  return EdgeDistribution(std::move(trellis), std::move(q));
}

FeasibilityReport validate(const EdgeDistribution& q) {
  const auto& trellis = *q.trellis();
  const auto& mass = q.edge_mass();
  FeasibilityReport report;

  double total = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    total += mass[k];
    if (mass[k] < report.worst_negativity) report.worst_negativity = mass[k];
  }
  report.normalization_residual = std::abs(total - 1.0);

  for (std::size_t i = 0; i < trellis.num_states(); ++i) {
    double out = 0.0, in = 0.0;
    for (std::uint32_t k : trellis.outgoing(i)) out += mass[k];
    for (std::uint32_t k : trellis.incoming(i)) in += mass[k];
    report.worst_flow_residual = std::max(report.worst_flow_residual, std::abs(out - in));
  }

  if (report.worst_negativity < 0.0)
    report.violations.push_back("negativity: min Q_ij = " + std::to_string(report.worst_negativity));
  if (report.normalization_residual > kFeasibilityTol)
    report.violations.push_back("normalization: |sum Q - 1| = " +
                                std::to_string(report.normalization_residual));
  if (report.worst_flow_residual > kFeasibilityTol)
    report.violations.push_back("flow conservation: worst residual = " +
                                std::to_string(report.worst_flow_residual));
  report.feasible = report.violations.empty();
  return report;
}

std::vector<EdgeDistribution> weyl_initializations(TrellisPtr trellis, std::size_t count,
                                                   std::uint64_t seed) {
  if (count < 1) throw InvalidInputError("weyl_initializations: count must be at least 1");
  const std::size_t dims = trellis->num_edges();

  // Increments: fractional parts of sqrt of the first |B| primes.
  std::vector<double> increment(dims);
  {
    std::size_t found = 0;
    for (std::uint64_t cand = 2; found < dims; ++cand) {
      bool prime = true;
      for (std::uint64_t d = 2; d * d <= cand; ++d)
        if (cand % d == 0) {
          prime = false;
          break;
        }
      if (prime) {
        double ip;
        increment[found++] = std::modf(std::sqrt(static_cast<double>(cand)), &ip);
      }
    }
  }

  // Seed only shifts the starting phase; the orbit itself is the Weyl sequence.
  std::vector<double> coord(dims);
  {
    Rng rng(derive_seed(seed, 0x57u));
    for (std::size_t d = 0; d < dims; ++d) coord[d] = rng.uniform();
  }

  // Mapping into the polytope: per state, its |X| coordinates are offset and
  // normalized into a transition row. The offset keeps rows (and with them
  // every Q_ij of the induced stationary distribution) away from the boundary
  // and also bounds the self-loop bias of the induced stationary mass, keeping
  // the per-edge mean within 5% of the uniform point.
  constexpr double kRowOffset = 0.5;
  std::vector<EdgeDistribution> out;
  out.reserve(count);
  std::vector<double> p(dims);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t d = 0; d < dims; ++d) {
      coord[d] += increment[d];
      coord[d] -= std::floor(coord[d]);
    }
    for (std::size_t i = 0; i < trellis->num_states(); ++i) {
      double row = 0.0;
      for (std::uint32_t k : trellis->outgoing(i)) row += coord[k] + kRowOffset;
      for (std::uint32_t k : trellis->outgoing(i)) p[k] = (coord[k] + kRowOffset) / row;
    }
    out.push_back(from_transitions(trellis, p));
  }
  return out;
}

SourceSample sample_sequence(const EdgeDistribution& q, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidInputError("sample_sequence: n must be at least 1");
  const auto& trellis = *q.trellis();
  const auto report = validate(q);
  if (!report.feasible) throw InvalidInputError("sample_sequence: infeasible distribution");

  Rng rng(seed);
  SourceSample sample;
  sample.seed = seed;
  sample.states.reserve(n + 1);
  sample.edge_indices.reserve(n);
  sample.symbols.reserve(n);

  std::uint32_t state = static_cast<std::uint32_t>(rng.categorical(q.stationary()));
  sample.states.push_back(state);
  std::vector<double> row;
  for (std::size_t t = 0; t < n; ++t) {
    const auto& out_edges = trellis.outgoing(state);
    row.resize(out_edges.size());
    for (std::size_t a = 0; a < out_edges.size(); ++a) row[a] = q.transition()[out_edges[a]];
    const std::uint32_t k = out_edges[rng.categorical(row)];
    const auto& e = trellis.edge(k);
    sample.edge_indices.push_back(k);
    sample.symbols.push_back(e.symbol);
    state = e.to;
    sample.states.push_back(state);
  }
  return sample;
}

std::string to_document(const EdgeDistribution& q) {
  const auto& trellis = *q.trellis();
  std::string doc;
  char buf[64];
  doc += "isiwtc_edge_distribution v1\n";
  doc += "nu " + std::to_string(trellis.nu()) + "\n";
  doc += "alphabet";
  for (double s : trellis.alphabet().symbols()) {
    std::snprintf(buf, sizeof buf, " %.17g", s);
    doc += buf;
  }
  doc += "\nedges " + std::to_string(trellis.num_edges()) + "\n";
  for (std::size_t k = 0; k < trellis.num_edges(); ++k) {
    const auto& e = trellis.edge(k);
    std::snprintf(buf, sizeof buf, "%u %u %.17g\n", e.from, e.to, q.edge_mass()[k]);
    doc += buf;
  }
  return doc;
}

EdgeDistribution edge_distribution_from_document(TrellisPtr trellis, const std::string& doc) {
  std::istringstream in(doc);
  std::string line;
  if (!std::getline(in, line) || line != "isiwtc_edge_distribution v1")
    throw InvalidInputError("edge distribution document: bad header");

  std::string word;
  int nu = 0;
  in >> word >> nu;
  if (word != "nu" || nu != trellis->nu())
    throw InvalidInputError("edge distribution document: trellis metadata mismatch (nu)");
  in >> word;
  if (word != "alphabet") throw InvalidInputError("edge distribution document: missing alphabet");
  for (std::size_t a = 0; a < trellis->alphabet().size(); ++a) {
    double s;
    if (!(in >> s) || s != trellis->alphabet().symbol(a))
      throw InvalidInputError("edge distribution document: trellis metadata mismatch (alphabet)");
  }
  std::size_t edges = 0;
  in >> word >> edges;
  if (word != "edges" || edges != trellis->num_edges())
    throw InvalidInputError("edge distribution document: trellis metadata mismatch (edges)");

  std::vector<double> q(edges, 0.0);
  for (std::size_t k = 0; k < edges; ++k) {
    std::uint32_t i, j;
    double mass;
    if (!(in >> i >> j >> mass)) throw InvalidInputError("edge distribution document: truncated");
    const auto idx = trellis->edge_index(i, j);
    if (!idx) throw InvalidInputError("edge distribution document: state pair is not an edge");
    q[*idx] = mass;
  }
  return EdgeDistribution(std::move(trellis), std::move(q));
}

}  // namespace isiwtc
