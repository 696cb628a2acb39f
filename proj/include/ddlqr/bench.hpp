#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddlqr/lqr_programs.hpp"
#include "ddlqr/lti_system.hpp"
#include "ddlqr/sdp/solver.hpp"

namespace ddlqr::bench {

struct SolveDiagnostics {
  std::string status;
  int iterations = 0;
  double gap = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
};

enum class TrialStatus { ok, rank_failure, solver_failure, degenerate };

const char* trial_status_name(TrialStatus s);

/// Outcome of one model-based vs data-driven comparison.
struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  TrialStatus status = TrialStatus::ok;
  std::string message;  ///< failure reason, empty when ok
  int input_draws = 0;  ///< PE input draws used to meet the rank condition

  double J_mb = 0.0;
  double J_dd = 0.0;
  double abs_cost_err = 0.0;
  std::vector<double> gain_errs;  ///< ‖K_dd(k) - K_mb(k)‖_F, k = 0..N-1

  /// Riccati cross-check of the model-based solve: expected cost under the
  /// Riccati gains and max_k ‖K_mb(k) - K_ric(k)‖_F.
  double J_riccati = 0.0;
  double riccati_gain_err = 0.0;

  SolveDiagnostics mb;
  SolveDiagnostics dd;

  std::vector<Matrix> gains_mb;
  std::vector<Matrix> gains_dd;

  bool ok() const { return status == TrialStatus::ok; }
  double max_gain_err() const;
  double mean_gain_err() const;
};

inline constexpr int kRankRetryCap = 10;

struct MonteCarloConfig {
  int trials = 100;
  int n = 3;
  int m = 1;
  int T = 15;
  CostWeights weights = CostWeights::identity(3, 1, 10);
  std::uint64_t base_seed = 1;
  sdp::Options solver;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
  /// When set every trial uses this plant instead of a random one.
  std::optional<LtiSystem> system;
};

/// Trial i draws everything from Rng(split_seed(base_seed, i)), in this
/// order: plant (unless fixed), x0, then PE inputs until the rank condition
/// holds (at most kRankRetryCap draws). Results are ordered by trial index
/// and do not depend on the thread count.
std::vector<TrialResult> run_monte_carlo(const MonteCarloConfig& cfg);

TrialResult run_trial(const MonteCarloConfig& cfg, int trial);

/// Discretized batch reactor, open-loop unstable.
LtiSystem reactor_system();

struct ReactorConfig {
  CostWeights weights = CostWeights::identity(4, 2, 10);
  int T = 15;
  std::uint64_t seed = 1;
  sdp::Options solver;
};

struct ReactorRun {
  TrialResult result;
  Vector x0;  ///< unit-norm initial state of the closed-loop run
  Trajectory trajectory;
};

/// One experiment on the reactor (trial 0 of seed), plus the closed loop
/// under the data-driven gains from a unit-norm standard normal x0 drawn
/// from split_seed(seed, 1'000'000).
ReactorRun run_reactor(const ReactorConfig& cfg);

struct Summary {
  int total = 0;
  int included = 0;
  int failed = 0;
  double mean_cost_err = 0.0;
  double median_cost_err = 0.0;
  double max_cost_err = 0.0;
  /// Over all steps of all included trials.
  double mean_gain_err = 0.0;
  double median_gain_err = 0.0;
  double max_gain_err = 0.0;
};

/// Statistics over the trials with status ok. Throws std::invalid_argument
/// on an empty list.
Summary summarize(std::span<const TrialResult> results);

void write_results_csv(std::ostream& out, std::span<const TrialResult> results);

/// Columns k, x1..xn, u1..um; the final state row leaves the inputs empty.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

void write_summary_json(std::ostream& out, const Summary& s);

}  // namespace ddlqr::bench
