#include "ddlqr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ddlqr/errors.hpp"
#include "ddlqr/excitation_data.hpp"
#include "ddlqr/riccati.hpp"
#include "ddlqr/rng.hpp"
#include "json.hpp"

namespace ddlqr::bench {

const char* trial_status_name(TrialStatus s) {
  switch (s) {
    case TrialStatus::ok: return "ok";
    case TrialStatus::rank_failure: return "rank_failure";
    case TrialStatus::solver_failure: return "solver_failure";
    case TrialStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

double TrialResult::max_gain_err() const {
  return gain_errs.empty() ? 0.0 : *std::max_element(gain_errs.begin(), gain_errs.end());
}

double TrialResult::mean_gain_err() const {
  if (gain_errs.empty()) return 0.0;
  return std::accumulate(gain_errs.begin(), gain_errs.end(), 0.0) / static_cast<double>(gain_errs.size());
}

namespace {

SolveDiagnostics diagnostics(const LqrSolution& s) {
  return {sdp::status_name(s.status), s.iterations, s.gap, s.primal_infeas, s.dual_infeas};
}

// Stream offset for the closed-loop initial state of run_reactor, far away
// from any trial index.
constexpr std::uint64_t kClosedLoopStream = 1'000'000;

}  // namespace

TrialResult run_trial(const MonteCarloConfig& cfg, int trial) {
  TrialResult r;
  r.trial = trial;
  r.seed = split_seed(cfg.base_seed, static_cast<std::uint64_t>(trial));
  Rng rng(r.seed);

  const LtiSystem sys = cfg.system ? *cfg.system : random_system(cfg.n, cfg.m, rng);
  const Vector x0 = rng.normal_vector(sys.n());

  std::optional<ExperimentRecord> rec;
  for (int draw = 1; draw <= kRankRetryCap; ++draw) {
    r.input_draws = draw;
    ExperimentRecord candidate = collect_experiment(sys, x0, pe_input(sys.m(), cfg.T, rng));
    if (rank_condition(candidate)) {
      rec = std::move(candidate);
      break;
    }
  }
  if (!rec) {
    r.status = TrialStatus::rank_failure;
    r.message = "rank condition failed on " + std::to_string(kRankRetryCap) + " input draws";
    return r;
  }

  try {
    const LqrSolution mb = solve_mb(sys, cfg.weights, cfg.solver);
    const LqrSolution dd = solve_dd(*rec, cfg.weights, cfg.solver);
    r.mb = diagnostics(mb);
    r.dd = diagnostics(dd);
    r.J_mb = mb.objective;
    r.J_dd = dd.objective;
    r.abs_cost_err = std::abs(dd.objective - mb.objective);
    for (std::size_t k = 0; k < mb.gains.size(); ++k) r.gain_errs.push_back((dd.gains[k] - mb.gains[k]).norm());

    const RiccatiSolution ric = riccati_recursion(sys, cfg.weights);
    r.J_riccati = expected_cost(cfg.weights, covariance_recursion(sys, ric.K));
    for (std::size_t k = 0; k < ric.K.size(); ++k)
      r.riccati_gain_err = std::max(r.riccati_gain_err, (mb.gains[k] - ric.K[k]).norm());
    r.gains_mb = mb.gains;
    r.gains_dd = dd.gains;
  } catch (const DegenerateSolutionError& e) {
    r.status = TrialStatus::degenerate;
    r.message = e.what();
  } catch (const Error& e) {
    r.status = TrialStatus::solver_failure;
    r.message = e.what();
  }
  return r;
}

std::vector<TrialResult> run_monte_carlo(const MonteCarloConfig& cfg) {
  if (cfg.trials < 0) throw std::invalid_argument("trial count must be nonnegative");
  std::vector<TrialResult> results(static_cast<std::size_t>(cfg.trials));
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max(cfg.trials, 1));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (int i = next++; i < cfg.trials && !failed; i = next++) {
      try {
        results[static_cast<std::size_t>(i)] = run_trial(cfg, i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

LtiSystem reactor_system() {
  Matrix A(4, 4), B(4, 2);
  A << 1.178, 0.001, 0.511, -0.403,
      -0.051, 0.661, -0.011, 0.061,
      0.076, 0.335, 0.560, 0.382,
      0.0, 0.335, 0.089, 0.849;
  B << 0.004, -0.087,
      0.467, 0.001,
      0.213, -0.235,
      0.213, -0.016;
  return LtiSystem(A, B);
}

ReactorRun run_reactor(const ReactorConfig& cfg) {
  MonteCarloConfig mc;
  mc.trials = 1;
  mc.T = cfg.T;
  mc.weights = cfg.weights;
  mc.base_seed = cfg.seed;
  mc.solver = cfg.solver;
  mc.system = reactor_system();

  ReactorRun run;
  run.result = run_trial(mc, 0);
  Rng rng(split_seed(cfg.seed, kClosedLoopStream));
  run.x0 = rng.normal_vector(4);
  run.x0 /= run.x0.norm();
  if (run.result.ok()) run.trajectory = simulate_feedback(*mc.system, run.x0, run.result.gains_dd);
  return run;
}

Summary summarize(std::span<const TrialResult> results) {
  if (results.empty()) throw std::invalid_argument("summarize: empty result list");
  Summary s;
  s.total = static_cast<int>(results.size());
  std::vector<double> cost, gain;
  for (const TrialResult& r : results) {
    if (!r.ok()) {
      ++s.failed;
      continue;
    }
    cost.push_back(r.abs_cost_err);
    gain.insert(gain.end(), r.gain_errs.begin(), r.gain_errs.end());
  }
  s.included = static_cast<int>(cost.size());

  auto stats = [](std::vector<double> v, double& mean, double& median, double& max) {
    if (v.empty()) return;
    mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    max = *std::max_element(v.begin(), v.end());
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  };
  stats(cost, s.mean_cost_err, s.median_cost_err, s.max_cost_err);
  stats(gain, s.mean_gain_err, s.median_gain_err, s.max_gain_err);
  return s;
}

void write_results_csv(std::ostream& out, std::span<const TrialResult> results) {
  const auto old = out.precision(17);
  out << "trial,seed,J_mb,J_dd,abs_cost_err,max_gain_err,mean_gain_err,status\n";
  for (const TrialResult& r : results) {
    out << r.trial << ',' << r.seed << ',';
    if (r.ok())
      out << r.J_mb << ',' << r.J_dd << ',' << r.abs_cost_err << ',' << r.max_gain_err() << ','
          << r.mean_gain_err();
    else
      out << ",,,,";
    out << ',' << trial_status_name(r.status) << '\n';
  }
  out.precision(old);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const auto old = out.precision(17);
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  const Eigen::Index m = traj.inputs.empty() ? 0 : traj.inputs.front().size();
  out << 'k';
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",u" << i;
  out << '\n';
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << traj.states[k](i);
    for (Eigen::Index i = 0; i < m; ++i) {
      out << ',';
      if (k < traj.inputs.size()) out << traj.inputs[k](i);
    }
    out << '\n';
  }
  out.precision(old);
}

void write_summary_json(std::ostream& out, const Summary& s) {
  const nlohmann::ordered_json j = {
      {"total", s.total},
      {"included", s.included},
      {"failed", s.failed},
      {"cost_err", {{"mean", s.mean_cost_err}, {"median", s.median_cost_err}, {"max", s.max_cost_err}}},
      {"gain_err", {{"mean", s.mean_gain_err}, {"median", s.median_gain_err}, {"max", s.max_gain_err}}},
  };
  out << j.dump(2) << '\n';
}

}  // namespace ddlqr::bench
