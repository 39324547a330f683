#include "isiwtc/smoother.hpp"

#include <cmath>
#include <limits>

#include "isiwtc/errors.hpp"

namespace isiwtc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_sum_exp_shifted(const double* values, std::size_t count) {
  double m = kNegInf;
  for (std::size_t k = 0; k < count; ++k) m = std::max(m, values[k]);
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) acc += std::exp(values[k] - m);
  return m + std::log(acc);
}

}  // namespace

PosteriorTables smooth(const EdgeDistribution& q, std::span<const double> observations,
                       double noise_variance, Party which) {
  if (!(noise_variance > 0.0)) throw InvalidInputError("smooth: noise variance must be positive");
  const auto& trellis = *q.trellis();
  const std::size_t n = observations.size();
  const std::size_t ns = trellis.num_states();
  const std::size_t ne = trellis.num_edges();
  if (n == 0) throw InvalidInputError("smooth: empty observation sequence");
  for (double y : observations)
    if (!std::isfinite(y)) throw InvalidInputError("smooth: observations must be finite");

  std::vector<double> log_p(ne);
  std::vector<double> out_mean(ne);
  for (std::size_t k = 0; k < ne; ++k) {
    log_p[k] = q.transition()[k] > 0.0 ? std::log(q.transition()[k]) : kNegInf;
    out_mean[k] = which == Party::bob ? trellis.edge(k).bob_output : trellis.edge(k).eve_output;
  }
  const double inv_2s2 = 1.0 / (2.0 * noise_variance);

  PosteriorTables tables;
  tables.n = n;
  tables.num_states = ns;
  tables.num_edges = ne;
  tables.single.assign(n * ns, 0.0);
  tables.pairwise.assign(n * ne, 0.0);

  // Forward pass, log domain, max-shifted per step. alpha row t lives at
  // offset t*ns and describes S_t (row 0 = stationary prior on S_0).
  std::vector<double> alpha((n + 1) * ns, kNegInf);
  for (std::size_t i = 0; i < ns; ++i)
    alpha[i] = q.stationary()[i] > 0.0 ? std::log(q.stationary()[i]) : kNegInf;

  std::vector<double> metric(ne);  // log p_e + log phi_t(e), reused per step
  std::vector<double> terms(trellis.alphabet().size());
  for (std::size_t t = 1; t <= n; ++t) {
    const double y = observations[t - 1];
    const double* prev = &alpha[(t - 1) * ns];
    double* cur = &alpha[t * ns];
    for (std::size_t k = 0; k < ne; ++k) {
      const double d = y - out_mean[k];
      metric[k] = log_p[k] - d * d * inv_2s2;
    }
    double row_max = kNegInf;
    for (std::size_t j = 0; j < ns; ++j) {
      const auto& in_edges = trellis.incoming(j);
      for (std::size_t a = 0; a < in_edges.size(); ++a)
        terms[a] = prev[trellis.edge(in_edges[a]).from] + metric[in_edges[a]];
      cur[j] = log_sum_exp_shifted(terms.data(), in_edges.size());
      row_max = std::max(row_max, cur[j]);
    }
    if (row_max == kNegInf) throw NumericalError("numerical underflow in forward pass");
    for (std::size_t j = 0; j < ns; ++j) cur[j] -= row_max;
  }

  // Backward pass with on-the-fly pairwise posteriors; only the current beta
  // row is kept. single(t, .) is the marginal of pairwise(t, .).
  std::vector<double> beta(ns, 0.0), beta_next(ns);
  std::vector<double> log_pair(ne);
  for (std::size_t t = n; t >= 1; --t) {
    const double y = observations[t - 1];
    const double* prev = &alpha[(t - 1) * ns];
    for (std::size_t k = 0; k < ne; ++k) {
      const double d = y - out_mean[k];
      metric[k] = log_p[k] - d * d * inv_2s2;
      log_pair[k] = prev[trellis.edge(k).from] + metric[k] + beta[trellis.edge(k).to];
    }
    const double z = log_sum_exp_shifted(log_pair.data(), ne);
    if (z == kNegInf) throw NumericalError("numerical underflow in backward pass");
    double* pair_row = &tables.pairwise[(t - 1) * ne];
    double* single_row = &tables.single[(t - 1) * ns];
    for (std::size_t k = 0; k < ne; ++k) {
      const double v = std::exp(log_pair[k] - z);
      pair_row[k] = v;
      single_row[trellis.edge(k).from] += v;
    }
    if (t == 1) break;
    double row_max = kNegInf;
    for (std::size_t i = 0; i < ns; ++i) {
      const auto& out_edges = trellis.outgoing(i);
      for (std::size_t a = 0; a < out_edges.size(); ++a)
        terms[a] = metric[out_edges[a]] + beta[trellis.edge(out_edges[a]).to];
      beta_next[i] = log_sum_exp_shifted(terms.data(), out_edges.size());
      row_max = std::max(row_max, beta_next[i]);
    }
    if (row_max == kNegInf) throw NumericalError("numerical underflow in backward pass");
    for (std::size_t i = 0; i < ns; ++i) beta_next[i] -= row_max;
    beta.swap(beta_next);
  }
  return tables;
}

}  // namespace isiwtc
