#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "ddlqr/errors.hpp"
#include "ddlqr/excitation_data.hpp"
#include "ddlqr/lqr_programs.hpp"
#include "ddlqr/riccati.hpp"

using namespace ddlqr;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

double max_gain_diff(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  REQUIRE(a.size() == b.size());
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, (a[k] - b[k]).norm());
  return e;
}

ExperimentRecord rich_record(const LtiSystem& sys, int T, Rng& rng) {
  const Vector x0 = rng.normal_vector(sys.n());
  for (int i = 0; i < 10; ++i) {
    ExperimentRecord rec = collect_experiment(sys, x0, pe_input(sys.m(), T, rng));
    if (rank_condition(rec)) return rec;
  }
  throw std::runtime_error("no rich record");
}

sdp::Options tight() {
  sdp::Options o;
  o.tol_gap = 1e-10;
  o.tol_feas = 1e-10;
  return o;
}

}  // namespace

TEST_CASE("program layout") {
  Rng rng(1);
  const LtiSystem sys = random_system(3, 2, rng);
  const CostWeights w = CostWeights::identity(3, 2, 4);

  const MbProgram mb = build_mb_program(sys, w);
  CHECK(mb.problem.block_dims.size() == 8);
  for (int b : mb.vars.state_blocks) CHECK(mb.problem.block_dims[static_cast<std::size_t>(b)] == 6);
  for (int b : mb.vars.input_blocks) CHECK(mb.problem.block_dims[static_cast<std::size_t>(b)] == 5);
  CHECK(mb.problem.num_free == 4 * 2 * 3);
  CHECK(mb.vars.S.size() == 5);
  CHECK(mb.vars.Z.size() == 4);
  CHECK_NOTHROW(mb.problem.validate());

  const ExperimentRecord rec = rich_record(sys, 12, rng);
  const DdProgram dd = build_dd_program(rec, w);
  CHECK(dd.problem.block_dims.size() == 8);
  CHECK(dd.problem.num_free == 4 * 12 * 3);
  CHECK(dd.vars.T == 12);
  CHECK_NOTHROW(dd.problem.validate());
}

TEST_CASE("one step scalar problem") {
  // A = B = 1, N = 1, unit weights: J = 5/2 with K(0) = -1/2.
  const LtiSystem sys(scalar(1), scalar(1));
  const CostWeights w = CostWeights::identity(1, 1, 1);
  const LqrSolution mb = solve_mb(sys, w);
  CHECK(mb.status == sdp::Status::optimal);
  CHECK(std::abs(mb.objective - 2.5) <= 1e-6);
  CHECK(std::abs(mb.gains[0](0, 0) + 0.5) <= 1e-4);

  Rng rng(4);
  const LqrSolution dd = solve_dd(rich_record(sys, 6, rng), w);
  CHECK(std::abs(dd.objective - 2.5) <= 1e-6);
  CHECK(std::abs(dd.gains[0](0, 0) + 0.5) <= 1e-4);
}

TEST_CASE("agreement with the Riccati recursion") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const LtiSystem sys = random_system(3, 1, rng);
    const CostWeights w = CostWeights::identity(3, 1, 6);
    const RiccatiSolution ric = riccati_recursion(sys, w);
    const double J = expected_cost(w, covariance_recursion(sys, ric.K));

    const LqrSolution mb = solve_mb(sys, w, tight());
    CHECK(max_gain_diff(mb.gains, ric.K) <= 1e-4);
    CHECK(std::abs(mb.objective - J) <= 1e-6 * J);

    const ExperimentRecord rec = rich_record(sys, 15, rng);
    const LqrSolution dd = solve_dd(rec, w, tight());
    CHECK(max_gain_diff(dd.gains, ric.K) <= 1e-3);
    CHECK(std::abs(dd.objective - J) <= 1e-6 * J);

    SUBCASE("data-driven identities") {
      REQUIRE(dd.G.size() == dd.gains.size());
      for (std::size_t k = 0; k < dd.G.size(); ++k) {
        CHECK((rec.X1T * dd.G[k] - closed_loop(sys, dd.gains[k])).norm() <= 1e-6);
        CHECK((rec.X0T * dd.G[k] - Matrix::Identity(3, 3)).norm() <= 1e-6);
      }
      for (const Matrix& S : dd.S) CHECK(min_eigenvalue(S) >= kCovarianceFloor);
    }
  }
}

TEST_CASE("objective scales with the weights") {
  Rng rng(3);
  const LtiSystem sys = random_system(2, 1, rng);
  const CostWeights w = CostWeights::identity(2, 1, 3);
  const CostWeights w3(3.0 * w.Qx(), 3.0 * w.Qf(), 3.0 * w.R(), 3);
  const LqrSolution a = solve_mb(sys, w, tight()), b = solve_mb(sys, w3, tight());
  CHECK(std::abs(b.objective - 3.0 * a.objective) <= 1e-6 * b.objective);
  CHECK(max_gain_diff(a.gains, b.gains) <= 1e-4);
}

TEST_CASE("data-poor records are rejected") {
  Rng rng(5);
  const LtiSystem sys = random_system(3, 1, rng);
  const ExperimentRecord poor = collect_experiment(sys, rng.normal_vector(3), pe_input(1, 3, rng));
  REQUIRE_FALSE(rank_condition(poor));
  CHECK_THROWS_AS(build_dd_program(poor, CostWeights::identity(3, 1, 2)), DataRichnessError);
  CHECK_THROWS_AS(solve_dd(poor, CostWeights::identity(3, 1, 2)), DataRichnessError);
}

TEST_CASE("solver failures surface as errors") {
  const LtiSystem sys(scalar(1), scalar(1));
  sdp::Options capped;
  capped.max_iters = 1;
  CHECK_THROWS_AS(solve_mb(sys, CostWeights::identity(1, 1, 2), capped), SolverError);
}

TEST_CASE("regularized blocks") {
  const LtiSystem sys(scalar(1), scalar(1));
  const CostWeights w = CostWeights::identity(1, 1, 1);
  BuildOptions reg;
  reg.regularization = 1e-3;
  const LqrSolution r = solve_mb(sys, w, {}, reg);
  CHECK(r.status == sdp::Status::optimal);
  // Tightening the cone can only raise the optimum, and only slightly.
  CHECK(r.objective >= 2.5 - 1e-7);
  CHECK(r.objective <= 2.5 + 1e-2);
}
