#ifndef ISIWTC_OPTIMIZER_HPP
#define ISIWTC_OPTIMIZER_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "isiwtc/rate_estimator.hpp"
#include "isiwtc/source_model.hpp"

namespace isiwtc {

/// Shape parameters of the surrogate; larger values mean a narrower surrogate
/// and smaller steps.
struct SurrogateParams {
  double kappa = 0.9;        // in (0, 1]
  double kappa_prime = 7.5;  // > 0
};

/// Surrogate value psi_Qtilde(Q): the linearized rate under the frozen T
/// values minus the kappa-shaped penalty. Throws "kappa domain" when an edge
/// leaves the penalty's log domain.
double surrogate_value(const EdgeDistribution& q, const EdgeDistribution& qtilde,
                       std::span<const double> t_bob, std::span<const double> t_eve,
                       const SurrogateParams& params);

struct MaximizeResult {
  EdgeDistribution qstar;
  double rho = 0.0;          // Perron-Frobenius eigenvalue of the payoff matrix
  double kappa_used = 0.0;   // kappa after any feasibility adjustments
  std::vector<double> qhat;  // (1-kappa) Qtilde + kappa Qstar, from the eigenvector route
  std::vector<double> gamma; // right eigenvector, L1-normalized, strictly positive
};

/// Closed-form surrogate maximizer: builds A_ij = p~_ij exp((tB-tE)/(kappa kappa')),
/// finds its Perron-Frobenius eigenpair by power iteration, forms the tilted
/// transitions, raises kappa just enough whenever the nonnegativity bound
/// fails, and solves the resulting linear system for Qstar.
MaximizeResult maximize_surrogate(const EdgeDistribution& qtilde, std::span<const double> t_bob,
                                  std::span<const double> t_eve, SurrogateParams params);

struct OptimizeConfig {
  std::size_t n = 100000;       // Monte-Carlo sequence length per iteration
  SurrogateParams params;
  double tol = 1e-4;            // |rate change| threshold, nats
  int consecutive = 3;          // sub-threshold deltas required in a row
  int max_iter = 60;
  double interior_floor = 1e-8;
  std::uint64_t seed = 0;
};

struct IterationRecord {
  int iteration = 0;
  double rate_entry = 0.0;     // Monte-Carlo estimate at the entry distribution
  double block_se = 0.0;
  double rho = 0.0;
  double kappa_used = 0.0;
  double max_abs_dq = 0.0;     // max |Qstar - Qtilde| over edges
  std::vector<double> q_entry; // edge masses at entry
  std::vector<double> qstar;   // maximizer output (empty when the loop stopped here)
  std::vector<double> t_bob;
  std::vector<double> t_eve;
};

struct OptimizeResult {
  EdgeDistribution q_final;
  std::vector<IterationRecord> trace;
  double rate_final = 0.0;   // fresh estimate at q_final
  double block_se_final = 0.0;
  bool converged = false;    // stopping rule fired before max_iter
  int iterations = 0;
};

/// Outer loop: estimate T at the current distribution, maximize the surrogate,
/// floor the result back into the interior, repeat. The same seed bundle
/// drives every iteration's estimate (common random numbers), so successive
/// rate values are comparable and the stopping rule sees progress, not noise.
OptimizeResult optimize(const EdgeDistribution& q0, const IsiWtcSpec& spec,
                        const OptimizeConfig& config);

/// One (SNR_B, SNR_E) grid cell of a sweep.
struct SweepCell {
  double snrb_db = 0.0;
  double snre_db = 0.0;
};

struct SweepCellResult {
  SweepCell cell;
  bool ok = false;
  std::string error;
  double best_rate = 0.0;
  double best_se = 0.0;
  int best_init = -1;
  double iud_rate = 0.0;
  double iud_se = 0.0;
  std::vector<double> local_optima;  // final rate per initialization
};

struct SweepConfig {
  std::vector<double> snrb_db;
  std::vector<double> snre_db;
  std::vector<double> gb_taps;  // normalized Bob filter taps
  std::vector<double> ge_taps;  // normalized Eve filter taps
  std::size_t init_count = 100;
  double es = 1.0;
  OptimizeConfig opt;
  int threads = 1;
  /// Test hook, called at the start of every (cell, init) job; exceptions it
  /// throws are recorded as that cell's failure.
  std::function<void(std::size_t cell_index)> cell_fault_hook;
};

/// Runs optimize() from `init_count` shared Weyl starts in every grid cell,
/// plus the i.u.d. baseline estimate. Jobs are distributed over a worker pool
/// with per-(cell, init) derived seeds, so results do not depend on
/// scheduling. Per-cell failures are recorded and the sweep continues.
std::vector<SweepCellResult> sweep(TrellisPtr trellis, const SweepConfig& config);

}  // namespace isiwtc

#endif
