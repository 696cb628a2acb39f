#include "ddlqr/cli.hpp"

#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "ddlqr/bench.hpp"
#include "ddlqr/errors.hpp"
#include "ddlqr/excitation_data.hpp"
#include "ddlqr/io.hpp"
#include "ddlqr/lqr_programs.hpp"
#include "ddlqr/riccati.hpp"
#include "ddlqr/rng.hpp"

namespace ddlqr::cli {
namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

// Thresholds applied by --check.
constexpr double kMcMeanCost = 1e-4;
constexpr double kMcMeanGain = 1e-3;
constexpr double kMcTrialMax = 1e-2;
constexpr double kReactorMean = 1e-2;

struct SolverFlags {
  double tol = 1e-8;
  int max_iters = 200;

  void attach(CLI::App* app) {
    app->add_option("--tol", tol, "Relative gap and feasibility tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-iters", max_iters, "Interior-point iteration cap")->check(CLI::PositiveNumber);
  }
  sdp::Options options() const {
    sdp::Options o;
    o.tol_gap = o.tol_feas = tol;
    o.max_iters = max_iters;
    return o;
  }
};

struct CollectArgs {
  std::string system, out = "data.json";
  int T = 15;
  std::uint64_t seed = 1;
};

struct SolveArgs {
  std::string mode, system, data, weights, out, dump_sdp;
  std::optional<int> N;
  double regularization = 0.0;
  SolverFlags solver;
};

struct RiccatiArgs {
  std::string system, weights, out;
  std::optional<int> N;
  bool dare = false;
};

struct MonteCarloArgs {
  int trials = 100, n = 3, m = 1, T = 15, N = 10, threads = 0;
  std::uint64_t seed = 1;
  std::string weights, csv = "montecarlo.csv", summary = "montecarlo_summary.json";
  bool check = false;
  SolverFlags solver;
};

struct ReactorArgs {
  int trials = 1, T = 15, N = 10, threads = 0;
  std::uint64_t seed = 1;
  std::string weights, trajectory = "reactor_trajectory.csv", csv = "reactor.csv", summary = "reactor_summary.json";
  bool check = false;
  SolverFlags solver;
};

// Fills options that were not given on the command line from a JSON object
// keyed by long option name.
void apply_config(CLI::App* app, const std::string& path) {
  const io::Json cfg = io::read_json_file(path);
  if (!cfg.is_object()) throw UsageError(path + ": config must be a JSON object");
  for (const auto& item : cfg.items()) {
    const std::string& key = item.key();
    CLI::Option* opt = key == "config" || key == "help" ? nullptr : app->get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError(path + ": unknown key \"" + key + "\" for command " + app->get_name());
    if (opt->count() > 0) continue;
    const io::Json& v = item.value();
    std::string text;
    if (v.is_string())
      text = v.get<std::string>();
    else if (v.is_boolean())
      text = v.get<bool>() ? "true" : "false";
    else if (v.is_number())
      text = v.dump();
    else
      throw UsageError(path + ": \"" + key + "\" must be a string, number or boolean");
    try {
      opt->add_result(text);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(path + ": \"" + key + "\": " + e.what());
    }
  }
}

void require(const std::string& value, const char* flag, const char* command) {
  if (value.empty()) throw UsageError(std::string(command) + ": " + flag + " is required");
}

CostWeights load_weights(const std::string& path, int n, int m, std::optional<int> N, int default_N) {
  if (path.empty()) return CostWeights::identity(n, m, N.value_or(default_N));
  CostWeights w = io::weights_from_json(io::read_json_file(path));
  return N ? w.with_horizon(*N) : w;
}

void emit(const io::Json& j, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << j.dump(2) << '\n';
  else
    io::write_json_file(path, j);
}

int cmd_collect(const CollectArgs& a, std::ostream& out) {
  require(a.system, "--system", "collect");
  const LtiSystem sys = io::system_from_json(io::read_json_file(a.system));
  if (a.T < 1) throw UsageError("collect: --T must be positive");
  Rng rng(a.seed);
  const Vector x0 = rng.normal_vector(sys.n());
  const std::vector<Vector> u = pe_input(sys.m(), a.T, rng);
  const ExperimentRecord rec = collect_experiment(sys, x0, u);
  io::write_json_file(a.out, io::to_json(rec));

  const bool rich = rank_condition(rec);
  out << "wrote " << a.out << " (T = " << a.T << ")\n";
  out << "pe_order " << pe_order(u) << " (need " << sys.n() + 1 << ")\n";
  out << "rank_condition " << (rich ? "true" : "false") << '\n';
  return rich ? kOk : kDataPoor;
}

void dump(const sdp::Problem& prob, const std::string& path) {
  std::ostringstream s;
  sdp::write_triplets(prob, s);
  io::write_text_file(path, s.str());
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  if (a.mode != "mb" && a.mode != "dd") throw UsageError("solve: --mode must be mb or dd");
  BuildOptions build;
  build.regularization = a.regularization;
  const sdp::Options opts = a.solver.options();

  LqrSolution sol;
  try {
    if (a.mode == "mb") {
      require(a.system, "--system", "solve --mode mb");
      const LtiSystem sys = io::system_from_json(io::read_json_file(a.system));
      const CostWeights w = load_weights(a.weights, sys.n(), sys.m(), a.N, 10);
      if (!a.dump_sdp.empty()) dump(build_mb_program(sys, w, build).problem, a.dump_sdp);
      sol = solve_mb(sys, w, opts, build);
    } else {
      require(a.data, "--data", "solve --mode dd");
      const ExperimentRecord rec = io::record_from_json(io::read_json_file(a.data));
      const CostWeights w = load_weights(a.weights, rec.n(), rec.m(), a.N, 10);
      if (!a.dump_sdp.empty()) dump(build_dd_program(rec, w, build).problem, a.dump_sdp);
      sol = solve_dd(rec, w, opts, build);
    }
  } catch (const SolverError& e) {
    err << "solver: " << e.what() << '\n';
    return kNumerical;
  }
  emit(io::to_json(sol), a.out, out);
  if (!a.out.empty())
    out << mode_name(sol.mode) << " objective " << std::setprecision(12) << sol.objective << " in "
        << sol.iterations << " iterations, gap " << std::setprecision(3) << sol.gap << '\n';
  return kOk;
}

int cmd_riccati(const RiccatiArgs& a, std::ostream& out) {
  require(a.system, "--system", "riccati");
  const LtiSystem sys = io::system_from_json(io::read_json_file(a.system));
  const CostWeights w = load_weights(a.weights, sys.n(), sys.m(), a.N, 10);
  io::Json j = io::to_json(riccati_recursion(sys, w));
  if (a.dare) j["dare"] = io::to_json(dare_fixed_point(sys, w.Qx(), w.R()));
  emit(j, a.out, out);
  return kOk;
}

void print_summary(const bench::Summary& s, std::ostream& out) {
  out << "trials " << s.total << ", included " << s.included << ", failed " << s.failed << '\n';
  out << std::scientific << std::setprecision(3);
  out << "cost error: mean " << s.mean_cost_err << " median " << s.median_cost_err << " max " << s.max_cost_err << '\n';
  out << "gain error: mean " << s.mean_gain_err << " median " << s.median_gain_err << " max " << s.max_gain_err << '\n';
  out << std::defaultfloat;
}

void write_outputs(const std::vector<bench::TrialResult>& results, const bench::Summary& s, const std::string& csv,
                   const std::string& summary, std::ostream& out) {
  std::ostringstream c, j;
  bench::write_results_csv(c, results);
  bench::write_summary_json(j, s);
  io::write_text_file(csv, c.str());
  io::write_text_file(summary, j.str());
  for (const auto& r : results)
    if (!r.ok()) out << "trial " << r.trial << " " << bench::trial_status_name(r.status) << ": " << r.message << '\n';
  print_summary(s, out);
}

int cmd_montecarlo(const MonteCarloArgs& a, std::ostream& out) {
  if (a.trials < 1) throw UsageError("montecarlo: --trials must be positive");
  bench::MonteCarloConfig cfg;
  cfg.trials = a.trials;
  cfg.n = a.n;
  cfg.m = a.m;
  cfg.T = a.T;
  cfg.weights = load_weights(a.weights, a.n, a.m, a.N, a.N);
  cfg.base_seed = a.seed;
  cfg.solver = a.solver.options();
  cfg.threads = a.threads;
  const auto results = bench::run_monte_carlo(cfg);
  const bench::Summary s = bench::summarize(results);
  write_outputs(results, s, a.csv, a.summary, out);
  if (!a.check) return kOk;

  const bool pass = s.included > 0 && s.mean_cost_err <= kMcMeanCost && s.mean_gain_err <= kMcMeanGain &&
                    s.max_cost_err <= kMcTrialMax && s.max_gain_err <= kMcTrialMax;
  out << "check " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kOk : kNumerical;
}

int cmd_reactor(const ReactorArgs& a, std::ostream& out) {
  if (a.trials < 1) throw UsageError("reactor: --trials must be positive");
  const LtiSystem sys = bench::reactor_system();
  bench::ReactorConfig rc;
  rc.weights = load_weights(a.weights, 4, 2, a.N, a.N);
  rc.T = a.T;
  rc.seed = a.seed;
  rc.solver = a.solver.options();
  const bench::ReactorRun run = bench::run_reactor(rc);
  if (!run.result.ok()) throw SolverError("reactor: " + run.result.message);

  std::ostringstream traj;
  bench::write_trajectory_csv(traj, run.trajectory);
  io::write_text_file(a.trajectory, traj.str());

  bench::MonteCarloConfig cfg;
  cfg.trials = a.trials;
  cfg.T = a.T;
  cfg.weights = rc.weights;
  cfg.base_seed = a.seed;
  cfg.solver = rc.solver;
  cfg.threads = a.threads;
  cfg.system = sys;
  const auto results = a.trials == 1 ? std::vector<bench::TrialResult>{run.result} : bench::run_monte_carlo(cfg);
  const bench::Summary s = bench::summarize(results);
  write_outputs(results, s, a.csv, a.summary, out);

  const DareSolution dare = dare_fixed_point(sys, rc.weights.Qx(), rc.weights.R());
  out << std::scientific << std::setprecision(3);
  out << "|K_dd(0) - K_dare| " << (run.result.gains_dd.front() - dare.K).norm() << '\n';
  out << "|x(N)| / |x(0)| " << run.trajectory.states.back().norm() / run.x0.norm() << '\n';
  out << std::defaultfloat;
  if (!a.check) return kOk;

  const bool pass = s.included > 0 && s.mean_cost_err <= kReactorMean && s.mean_gain_err <= kReactorMean;
  out << "check " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kOk : kNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-horizon LQR from models or data via semidefinite programming", "ddlqr"};
  app.require_subcommand(1);
  std::string config;

  CollectArgs collect;
  auto* c = app.add_subcommand("collect", "Run one experiment with a Gaussian input and write its data");
  c->add_option("--config", config, "JSON file of option values");
  c->add_option("--system", collect.system, "System JSON {A, B}");
  c->add_option("--T", collect.T, "Experiment length");
  c->add_option("--seed", collect.seed, "Seed for x0 and the input");
  c->add_option("--out", collect.out, "Data JSON to write");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve the model-based or data-driven LQR program");
  s->add_option("--config", config, "JSON file of option values");
  s->add_option("--mode", solve.mode, "mb or dd");
  s->add_option("--system", solve.system, "System JSON (mode mb)");
  s->add_option("--data", solve.data, "Data JSON (mode dd)");
  s->add_option("--weights", solve.weights, "Weights JSON {N, Qx, Qf, R}; identity weights if omitted");
  s->add_option("--N", solve.N, "Horizon (overrides the weights file; default 10)");
  s->add_option("--regularization", solve.regularization, "Require blocks >= eps I")->check(CLI::NonNegativeNumber);
  s->add_option("--out", solve.out, "Solution JSON to write (stdout if omitted)");
  s->add_option("--dump-sdp", solve.dump_sdp, "Also write the SDP in sparse triplet form");
  solve.solver.attach(s);

  RiccatiArgs ric;
  auto* r = app.add_subcommand("riccati", "Riccati recursion gains and P(0)");
  r->add_option("--config", config, "JSON file of option values");
  r->add_option("--system", ric.system, "System JSON");
  r->add_option("--weights", ric.weights, "Weights JSON; identity weights if omitted");
  r->add_option("--N", ric.N, "Horizon (overrides the weights file; default 10)");
  r->add_flag("--dare", ric.dare, "Also report the algebraic Riccati solution");
  r->add_option("--out", ric.out, "JSON to write (stdout if omitted)");

  MonteCarloArgs mc;
  auto* m = app.add_subcommand("montecarlo", "Model-based vs data-driven comparison on random systems");
  m->add_option("--config", config, "JSON file of option values");
  m->add_option("--trials", mc.trials, "Number of trials");
  m->add_option("--n", mc.n, "State dimension");
  m->add_option("--m", mc.m, "Input dimension");
  m->add_option("--T", mc.T, "Experiment length");
  m->add_option("--N", mc.N, "Horizon");
  m->add_option("--seed", mc.seed, "Base seed");
  m->add_option("--threads", mc.threads, "Worker threads (0: all cores)");
  m->add_option("--weights", mc.weights, "Weights JSON; identity weights if omitted");
  m->add_option("--csv", mc.csv, "Per-trial CSV");
  m->add_option("--summary", mc.summary, "Summary JSON");
  m->add_flag("--check", mc.check, "Exit 2 unless the error statistics meet the acceptance thresholds");
  mc.solver.attach(m);

  ReactorArgs rx;
  auto* x = app.add_subcommand("reactor", "Batch reactor case study");
  x->add_option("--config", config, "JSON file of option values");
  x->add_option("--trials", rx.trials, "Number of seeds in the statistics");
  x->add_option("--T", rx.T, "Experiment length");
  x->add_option("--N", rx.N, "Horizon");
  x->add_option("--seed", rx.seed, "Base seed");
  x->add_option("--threads", rx.threads, "Worker threads (0: all cores)");
  x->add_option("--weights", rx.weights, "Weights JSON; identity weights if omitted");
  x->add_option("--trajectory", rx.trajectory, "Closed-loop trajectory CSV");
  x->add_option("--csv", rx.csv, "Per-trial CSV");
  x->add_option("--summary", rx.summary, "Summary JSON");
  x->add_flag("--check", rx.check, "Exit 2 unless the mean errors meet the acceptance thresholds");
  rx.solver.attach(x);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    if (!config.empty()) apply_config(cmd, config);
    if (cmd == c) return cmd_collect(collect, out);
    if (cmd == s) return cmd_solve(solve, out, err);
    if (cmd == r) return cmd_riccati(ric, out);
    if (cmd == m) return cmd_montecarlo(mc, out);
    return cmd_reactor(rx, out);
  } catch (const DataRichnessError& e) {
    err << "data: " << e.what() << '\n';
    return kDataPoor;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "io: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionError& e) {
    err << "dimension: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "numerical: " << e.what() << '\n';
    return kNumerical;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"ddlqr"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ddlqr::cli
