#include "isiwtc/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "isiwtc/channel.hpp"
#include "isiwtc/errors.hpp"
#include "isiwtc/linalg.hpp"

namespace isiwtc {

namespace {

void require_interior(const EdgeDistribution& q, const char* where) {
  for (double v : q.edge_mass())
    if (!(v > 0.0)) throw InvalidInputError(std::string(where) + ": distribution is not interior");
}

// Power iteration for the dominant eigenpair of a nonnegative matrix, with a
// diagonal shift fallback for periodic supports. The eigenvector is
// L1-normalized and strictly positive for irreducible input.
void perron_frobenius(const Matrix& a, double& rho, std::vector<double>& gamma) {
  const std::size_t ns = a.rows();
  const double tol = 1e-12;

  double shift = 0.0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    gamma.assign(ns, 1.0 / static_cast<double>(ns));
    std::vector<double> w(ns);
    for (long iter = 0; iter < 200000; ++iter) {
      double norm = 0.0;
      for (std::size_t i = 0; i < ns; ++i) {
        double acc = shift * gamma[i];
        for (std::size_t j = 0; j < ns; ++j) acc += a(i, j) * gamma[j];
        w[i] = acc;
        norm += acc;
      }
      if (!(norm > 0.0)) throw NumericalError("power iteration collapsed");
      double residual = 0.0, gmax = 0.0;
      for (std::size_t i = 0; i < ns; ++i) {
        residual = std::max(residual, std::abs(w[i] - norm * gamma[i]));
        gmax = std::max(gmax, std::abs(gamma[i]));
      }
      for (std::size_t i = 0; i < ns; ++i) gamma[i] = w[i] / norm;
      if (residual <= tol * std::max(gmax, 1e-300)) {
        rho = norm - shift;
        return;
      }
    }
    // Not converged: make the matrix primitive and retry.
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = 0; j < ns; ++j) shift = std::max(shift, a(i, j));
    shift *= static_cast<double>(ns);
  }
  throw NumericalError("power iteration did not converge");
}

}  // namespace

double surrogate_value(const EdgeDistribution& q, const EdgeDistribution& qtilde,
                       std::span<const double> t_bob, std::span<const double> t_eve,
                       const SurrogateParams& params) {
  const auto& trellis = *qtilde.trellis();
  if (q.trellis()->num_edges() != trellis.num_edges())
    throw InvalidInputError("surrogate_value: trellis mismatch");
  if (t_bob.size() != trellis.num_edges() || t_eve.size() != trellis.num_edges())
    throw InvalidInputError("surrogate_value: T vector size mismatch");
  require_interior(qtilde, "surrogate_value");
  const double kappa = params.kappa;
  const double kp = params.kappa_prime;
  if (!(kappa > 0.0) || kappa > 1.0 || !(kp > 0.0))
    throw InvalidInputError("surrogate_value: parameters out of range");

  double linear = 0.0;
  double penalty_q = 0.0;
  for (std::size_t k = 0; k < trellis.num_edges(); ++k) {
    linear += q.edge_mass()[k] * (t_bob[k] - t_eve[k]);
    const double ratio = 1.0 + kappa * (q.edge_mass()[k] - qtilde.edge_mass()[k]) / qtilde.edge_mass()[k];
    if (!(ratio > 0.0)) throw InvalidInputError("kappa domain: 1 + kappa (dQ)_ij <= 0 on an edge");
    penalty_q += qtilde.edge_mass()[k] * ratio * std::log(ratio);
  }
  double penalty_mu = 0.0;
  for (std::size_t i = 0; i < trellis.num_states(); ++i) {
    const double ratio =
        1.0 + kappa * (q.stationary()[i] - qtilde.stationary()[i]) / qtilde.stationary()[i];
    if (!(ratio > 0.0)) throw InvalidInputError("kappa domain: 1 + kappa (dmu)_i <= 0 on a state");
    penalty_mu += qtilde.stationary()[i] * ratio * std::log(ratio);
  }
  return linear - kp * (penalty_q - penalty_mu);
}

MaximizeResult maximize_surrogate(const EdgeDistribution& qtilde, std::span<const double> t_bob,
                                  std::span<const double> t_eve, SurrogateParams params) {
  const auto& trellis = *qtilde.trellis();
  const std::size_t ns = trellis.num_states();
  const std::size_t ne = trellis.num_edges();
  if (t_bob.size() != ne || t_eve.size() != ne)
    throw InvalidInputError("maximize_surrogate: T vector size mismatch");
  for (std::size_t k = 0; k < ne; ++k)
    if (!std::isfinite(t_bob[k]) || !std::isfinite(t_eve[k]))
      throw InvalidInputError("maximize_surrogate: T values must be finite");
  require_interior(qtilde, "maximize_surrogate");
  double kappa = params.kappa;
  const double kp = params.kappa_prime;
  if (!(kappa > 0.0) || kappa > 1.0 || !(kp > 0.0))
    throw InvalidInputError("maximize_surrogate: parameters out of range");

  const auto& qt = qtilde.edge_mass();
  const auto& pt = qtilde.transition();
  const auto& mut = qtilde.stationary();

  double rho = 0.0;
  std::vector<double> gamma;
  std::vector<double> phat(ne);
  std::vector<double> qhat;

  for (int adjustment = 0;; ++adjustment) {
    Matrix a(ns, ns);
    bool reducible = false;
    for (std::size_t k = 0; k < ne; ++k) {
      const auto& e = trellis.edge(k);
      const double v = pt[k] * std::exp((t_bob[k] - t_eve[k]) / (kappa * kp));
      if (!(v > 0.0)) reducible = true;
      a(e.from, e.to) += v;
    }
    if (reducible) throw NumericalError("reducible A: payoff matrix support lost an edge");

    perron_frobenius(a, rho, gamma);
    for (double g : gamma)
      if (!(g > 0.0)) throw NumericalError("reducible A: eigenvector is not strictly positive");

    for (std::size_t k = 0; k < ne; ++k) {
      const auto& e = trellis.edge(k);
      phat[k] = a(e.from, e.to) / rho * gamma[e.to] / gamma[e.from];
    }
    // Rows of the tilted kernel sum to 1 up to the eigen residual; tidy them
    // so the stationary solve sees exact rows.
    for (std::size_t i = 0; i < ns; ++i) {
      double row = 0.0;
      for (std::uint32_t k : trellis.outgoing(i)) row += phat[k];
      for (std::uint32_t k : trellis.outgoing(i)) phat[k] /= row;
    }
    const EdgeDistribution qhat_dist = from_transitions(qtilde.trellis(), phat);
    qhat = qhat_dist.edge_mass();

    double worst_ratio = 0.0;
    for (std::size_t k = 0; k < ne; ++k)
      worst_ratio = std::max(worst_ratio, (qt[k] - qhat[k]) / qt[k]);
    if (kappa >= worst_ratio - 1e-14 || kappa >= 1.0) break;
    if (adjustment >= 64) {
      kappa = 1.0;  // always admissible: the bound reduces to Qhat >= 0
      continue;
    }
    kappa = std::min(1.0, worst_ratio + 0.01);
  }

  // Linear system for Qstar: one tilted-kernel equation per edge, flow
  // conservation for every state except the lowest-indexed one (their sum is
  // zero, so one row is redundant), and normalization.
  Matrix m(ne + ns, ne);
  std::vector<double> rhs(ne + ns, 0.0);
  const double lever = kappa < 1.0 ? (1.0 - kappa) / kappa : 0.0;
  for (std::size_t k = 0; k < ne; ++k) {
    const auto& e = trellis.edge(k);
    m(k, k) += 1.0;
    for (std::uint32_t k2 : trellis.outgoing(e.from)) m(k, k2) -= phat[k];
    rhs[k] = lever * (mut[e.from] * phat[k] - qt[k]);
  }
  for (std::size_t i = 1; i < ns; ++i) {
    const std::size_t row = ne + (i - 1);
    for (std::uint32_t k : trellis.incoming(i)) m(row, k) += 1.0;
    for (std::uint32_t k : trellis.outgoing(i)) m(row, k) -= 1.0;
  }
  for (std::size_t k = 0; k < ne; ++k) m(ne + ns - 1, k) = 1.0;
  rhs[ne + ns - 1] = 1.0;

  std::vector<double> qstar = solve_consistent(std::move(m), std::move(rhs));

  MaximizeResult result{EdgeDistribution(qtilde.trellis(), std::move(qstar)), rho, kappa,
                        std::move(qhat), std::move(gamma)};
  return result;
}

OptimizeResult optimize(const EdgeDistribution& q0, const IsiWtcSpec& spec,
                        const OptimizeConfig& config) {
  if (config.max_iter < 0) throw InvalidInputError("optimize: max_iter must be non-negative");
  EdgeDistribution q = q0.floored(config.interior_floor);
  // One seed bundle for the whole trajectory: every iteration re-estimates T
  // with the same random numbers, which makes consecutive rate estimates
  // directly comparable (their Monte-Carlo noise is common, not independent).
  const SeedBundle seeds = SeedBundle::derive(config.seed);

  OptimizeResult result{q, {}, 0.0, 0.0, false, 0};
  std::vector<double> rates;

  for (int iter = 0; iter < config.max_iter; ++iter) {
    const TStatistics stats = estimate_secure_rate(q, spec, config.n, seeds);
    rates.push_back(stats.rate_estimate);

    IterationRecord record;
    record.iteration = iter;
    record.rate_entry = stats.rate_estimate;
    record.block_se = stats.block_se;
    record.q_entry = q.edge_mass();
    record.t_bob = stats.bob;
    record.t_eve = stats.eve;

    bool converged = false;
    if (static_cast<int>(rates.size()) > config.consecutive) {
      converged = true;
      for (int k = 0; k < config.consecutive; ++k) {
        const std::size_t r = rates.size() - 1 - k;
        if (std::abs(rates[r] - rates[r - 1]) >= config.tol) {
          converged = false;
          break;
        }
      }
    }
    if (converged) {
      result.trace.push_back(std::move(record));
      result.q_final = q;
      result.rate_final = stats.rate_estimate;
      result.block_se_final = stats.block_se;
      result.converged = true;
      result.iterations = iter + 1;
      return result;
    }

    MaximizeResult step = maximize_surrogate(q, stats.bob, stats.eve, config.params);
    record.rho = step.rho;
    record.kappa_used = step.kappa_used;
    record.qstar = step.qstar.edge_mass();
    for (std::size_t k = 0; k < q.edge_mass().size(); ++k)
      record.max_abs_dq =
          std::max(record.max_abs_dq, std::abs(step.qstar.edge_mass()[k] - q.edge_mass()[k]));
    result.trace.push_back(std::move(record));

    q = step.qstar.floored(config.interior_floor);
  }

  const TStatistics final_stats = estimate_secure_rate(q, spec, config.n, seeds);
  result.q_final = q;
  result.rate_final = final_stats.rate_estimate;
  result.block_se_final = final_stats.block_se;
  result.iterations = config.max_iter;
  return result;
}

std::vector<SweepCellResult> sweep(TrellisPtr trellis, const SweepConfig& config) {
  if (config.snrb_db.empty() || config.snre_db.empty())
    throw InvalidInputError("sweep: SNR grid must be non-empty");
  if (config.init_count < 1) throw InvalidInputError("sweep: init_count must be at least 1");

  struct Cell {
    SweepCell snr;
    IsiWtcSpec spec;
  };
  const TransferPolynomial gb(config.gb_taps);
  const TransferPolynomial ge(config.ge_taps);
  std::vector<Cell> cells;
  for (double sb : config.snrb_db)
    for (double se : config.snre_db)
      cells.push_back(Cell{{sb, se},
                           IsiWtcSpec(gb, ge, noise_variance_from_snr_db(config.es, sb),
                                      noise_variance_from_snr_db(config.es, se))});

  const auto inits = weyl_initializations(trellis, config.init_count, config.opt.seed);
  const EdgeDistribution iud = EdgeDistribution::iud(trellis);

  // Job j = cell * (init_count + 1) + k, where k == init_count is the i.u.d.
  // baseline estimate and smaller k are optimizer runs from the k-th start.
  const std::size_t jobs_per_cell = config.init_count + 1;
  const std::size_t total_jobs = cells.size() * jobs_per_cell;
  struct JobOutcome {
    bool ok = false;
    std::string error;
    double rate = 0.0;
    double se = 0.0;
  };
  std::vector<JobOutcome> outcomes(total_jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= total_jobs) return;
      const std::size_t cell_index = j / jobs_per_cell;
      const std::size_t k = j % jobs_per_cell;
      JobOutcome& out = outcomes[j];
      try {
        if (config.cell_fault_hook) config.cell_fault_hook(cell_index);
        OptimizeConfig opt = config.opt;
        opt.seed = derive_seed(config.opt.seed, 0x10000u + j);
        if (k == config.init_count) {
          const TStatistics stats =
              estimate_secure_rate(iud, cells[cell_index].spec, opt.n, SeedBundle::derive(opt.seed));
          out.rate = stats.rate_estimate;
          out.se = stats.block_se;
        } else {
          const OptimizeResult res = optimize(inits[k], cells[cell_index].spec, opt);
          out.rate = res.rate_final;
          out.se = res.block_se_final;
        }
        out.ok = true;
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };

  const int threads = std::max(1, config.threads);
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<SweepCellResult> results(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepCellResult& r = results[c];
    r.cell = cells[c].snr;
    r.ok = true;
    for (std::size_t k = 0; k < jobs_per_cell; ++k) {
      const JobOutcome& out = outcomes[c * jobs_per_cell + k];
      if (!out.ok) {
        r.ok = false;
        if (r.error.empty()) r.error = out.error;
        continue;
      }
      if (k == config.init_count) {
        r.iud_rate = out.rate;
        r.iud_se = out.se;
      } else {
        r.local_optima.push_back(out.rate);
        if (r.best_init < 0 || out.rate > r.best_rate) {
          r.best_rate = out.rate;
          r.best_se = out.se;
          r.best_init = static_cast<int>(k);
        }
      }
    }
  }
  return results;
}

}  // namespace isiwtc
