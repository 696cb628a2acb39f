#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"

#include "ddlqr/errors.hpp"
#include "ddlqr/lti_system.hpp"
#include "ddlqr/riccati.hpp"
#include "ddlqr/rng.hpp"
#include "ddlqr/sdp/problem.hpp"
#include "ddlqr/sdp/solver.hpp"

using namespace ddlqr;
using namespace ddlqr::sdp;

namespace {

const std::filesystem::path kExamples = std::filesystem::path(DDLQR_TEST_DATA) / "sdp";

Problem load(const std::string& name) {
  std::ifstream in(kExamples / name);
  REQUIRE(in.good());
  return read_triplets(in);
}

// min ⟨C, X⟩ s.t. Tr(X) = 1 over a single block.
Problem trace_lp(const Matrix& C) {
  Problem p;
  const int d = static_cast<int>(C.rows());
  p.add_block(d);
  Constraint tr;
  tr.rhs = 1.0;
  for (int i = 0; i < d; ++i) {
    tr.entries.push_back({0, i, i, 1.0});
    for (int j = i; j < d; ++j)
      if (C(i, j) != 0.0) p.objective.push_back({0, i, j, C(i, j)});
  }
  p.constraints.push_back(tr);
  return p;
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

void check_psd(const Solution& s) {
  for (const Matrix& X : s.X) CHECK(min_eigenvalue(X) >= -1e-9);
}

}  // namespace

TEST_CASE("hand examples") {
  SUBCASE("scalar equality") {
    const Solution s = solve(load("scalar_equality.sdp"));
    CHECK(s.status == Status::optimal);
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("trace fixed by the constraints") {
    const Solution s = solve(load("trace_fixed_diagonal.sdp"));
    CHECK(s.status == Status::optimal);
    CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("eigenvalue LP") {
    const Solution s = solve(load("min_eigenvalue.sdp"));
    CHECK(s.status == Status::optimal);
    CHECK(std::abs(s.objective - 1.0) <= 1e-7);
    CHECK(max_abs_diff(s.X[0], Matrix{{1, 0}, {0, 0}}) <= 1e-7);
  }
}

TEST_CASE("trace LP optimum is the smallest eigenvalue") {
  Rng rng(17);
  for (int d : {1, 2, 3, 5, 8, 12}) {
    for (int rep = 0; rep < 4; ++rep) {
      const Matrix C = symmetrize(rng.normal_matrix(d, d));
      const Solution s = solve(trace_lp(C));
      CAPTURE(d);
      CHECK(s.status == Status::optimal);
      CHECK(std::abs(s.objective - min_eigenvalue(C)) <= 1e-7);
      check_psd(s);
    }
  }
}

TEST_CASE("shipped examples pass KKT verification") {
  // Optimal values known in closed form or from the Riccati recursion.
  const double maxcut = -(25.0 + 5.0 * std::sqrt(5.0)) / 8.0;
  const Matrix reactor_A{{1.178, 0.001, 0.511, -0.403},
                         {-0.051, 0.661, -0.011, 0.061},
                         {0.076, 0.335, 0.560, 0.382},
                         {0.0, 0.335, 0.089, 0.849}};
  const Matrix reactor_B{{0.004, -0.087}, {0.467, 0.001}, {0.213, -0.235}, {0.213, -0.016}};
  double reactor_n3 = 0.0;
  for (const Matrix& P : riccati_recursion(LtiSystem(reactor_A, reactor_B), CostWeights::identity(4, 2, 3)).P)
    reactor_n3 += P.trace();
  const std::map<std::string, double> expected{
      {"scalar_equality.sdp", 1.0},     {"trace_fixed_diagonal.sdp", 2.0},  {"min_eigenvalue.sdp", 1.0},
      {"maxcut_cycle5.sdp", maxcut},    {"free_variable_link.sdp", 1.0},    {"lqr_mb_scalar_n1.sdp", 2.5},
      {"lqr_dd_scalar_n3.sdp", 1.0 + 1.5 + 1.6 + 21.0 / 13.0},           {"lqr_mb_reactor_n3.sdp", reactor_n3},
  };

  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kExamples)) {
    if (entry.path().extension() != ".sdp") continue;
    const std::string name = entry.path().filename().string();
    CAPTURE(name);
    ++seen;
    const Problem p = load(name);
    const Solution s = solve(p);
    CHECK(s.status == Status::optimal);
    const KktReport k = verify_kkt(p, s, 1e-6);
    CHECK(k.primal_ok);
    CHECK(k.dual_ok);
    CHECK(k.complementarity_ok);
    CHECK(k.psd_ok);
    check_psd(s);
    REQUIRE(expected.count(name) == 1);
    const double ref = expected.at(name);
    CHECK(std::abs(s.objective - ref) <= 1e-7 * (1.0 + std::abs(ref)));
  }
  CHECK(seen == static_cast<int>(expected.size()));
}

TEST_CASE("weak duality at every iterate") {
  Options opts;
  opts.record_history = true;
  for (const char* name : {"maxcut_cycle5.sdp", "lqr_mb_reactor_n3.sdp", "lqr_dd_scalar_n3.sdp"}) {
    CAPTURE(name);
    const Solution s = solve(load(name), opts);
    REQUIRE(!s.history.empty());
    for (const IterateRecord& r : s.history) {
      // Along infeasible iterates the gap splits into ⟨X, Z⟩ ≥ 0 plus a
      // residual term; the identity is exact up to rounding.
      const double scale = 1.0 + std::abs(r.primal_obj) + std::abs(r.dual_obj);
      CHECK(r.complementarity >= 0.0);
      CHECK(std::abs(r.primal_obj - r.dual_obj - r.complementarity - r.residual_correction) <= 1e-10 * scale);
      CHECK(r.primal_obj - r.residual_correction >= r.dual_obj - 1e-10 * scale);
    }
    CHECK(s.objective >= s.dual_objective - 1e-10 * (1.0 + std::abs(s.objective)));
  }
}

TEST_CASE("row scaling leaves the solution unchanged") {
  const Options opts;
  for (const char* name : {"min_eigenvalue.sdp", "maxcut_cycle5.sdp", "lqr_mb_reactor_n3.sdp"}) {
    CAPTURE(name);
    const Problem p = load(name);
    const Solution base = solve(p, opts);
    Problem q = p;
    Rng rng(3);
    for (Constraint& c : q.constraints) {
      const double alpha = std::exp(3.0 * rng.normal());
      for (Entry& e : c.entries) e.value *= alpha;
      for (auto& f : c.free_terms) f.second *= alpha;
      c.rhs *= alpha;
    }
    const Solution scaled = solve(q, opts);
    REQUIRE(scaled.status == Status::optimal);
    for (std::size_t b = 0; b < base.X.size(); ++b) CHECK(max_abs_diff(base.X[b], scaled.X[b]) <= 10 * opts.tol_gap);
  }
}

TEST_CASE("decoupled blocks solve independently") {
  const Options opts;
  const Problem a = load("maxcut_cycle5.sdp");
  const Problem b = load("min_eigenvalue.sdp");
  Problem joint = a;
  const int shift = static_cast<int>(a.block_dims.size());
  for (int d : b.block_dims) joint.add_block(d);
  for (Entry e : b.objective) {
    e.block += shift;
    joint.objective.push_back(e);
  }
  for (Constraint c : b.constraints) {
    for (Entry& e : c.entries) e.block += shift;
    joint.constraints.push_back(c);
  }
  const Solution sa = solve(a, opts), sb = solve(b, opts), sj = solve(joint, opts);
  REQUIRE(sj.status == Status::optimal);
  CHECK(max_abs_diff(sj.X[0], sa.X[0]) <= 10 * opts.tol_gap);
  CHECK(max_abs_diff(sj.X[1], sb.X[0]) <= 10 * opts.tol_gap);
  const double sum = sa.objective + sb.objective;
  CHECK(std::abs(sj.objective - sum) <= 10 * opts.tol_gap * (1.0 + std::abs(sum)));
}

TEST_CASE("KKT verifier") {
  const Problem p = load("min_eigenvalue.sdp");
  const Solution s = solve(p);
  CHECK(verify_kkt(p, s, 1e-6).ok());

  Solution bad = s;
  bad.X[0](0, 0) += 1e-3;
  const KktReport r = verify_kkt(p, bad, 1e-6);
  CHECK_FALSE(r.primal_ok);
  CHECK_FALSE(r.ok());

  Problem empty;
  empty.add_block(2);
  const Solution e = solve(empty);
  CHECK(e.status == Status::optimal);
  CHECK(verify_kkt(empty, e, 1e-6).ok());
}

TEST_CASE("presolve handles dependent and inconsistent rows") {
  Problem p = load("trace_fixed_diagonal.sdp");
  Constraint dup = p.constraints[0];
  for (Entry& e : dup.entries) e.value *= 2.0;
  dup.rhs *= 2.0;
  p.constraints.push_back(dup);
  const Solution s = solve(p);
  CHECK(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_FALSE(s.warnings.empty());
  CHECK(s.y.size() == 3);
  CHECK(verify_kkt(p, s, 1e-6).ok());

  p.constraints.back().rhs += 1.0;
  CHECK(solve(p).status == Status::infeasible_suspected);
}

TEST_CASE("unbounded and iteration-capped problems") {
  Problem unbounded;
  unbounded.num_free = 1;
  unbounded.free_objective = {-1.0};
  unbounded.add_block(1);
  CHECK(solve(unbounded).status == Status::infeasible_suspected);

  // min X11 s.t. X12 = 1 on a 2x2 block has infimum 0, never attained.
  // An interior method still reaches it to within the gap tolerance.
  Problem open;
  open.add_block(2);
  open.objective.push_back({0, 0, 0, 1.0});
  open.constraints.push_back({{{0, 0, 1, 0.5}}, {}, 1.0});
  const Solution s = solve(open);
  if (s.status == Status::optimal) CHECK(std::abs(s.objective) <= 1e-6);
  check_psd(s);

  Options capped;
  capped.max_iters = 2;
  const Solution c = solve(load("maxcut_cycle5.sdp"), capped);
  CHECK(c.status == Status::max_iters);
  CHECK(c.iterations == 2);
  check_psd(c);
}

TEST_CASE("problem validation and triplet round trip") {
  Problem p;
  p.add_block(2);
  p.objective.push_back({0, 1, 0, 1.0});
  CHECK_THROWS_AS(p.validate(), DimensionError);
  p.objective = {{0, 0, 2, 1.0}};
  CHECK_THROWS_AS(p.validate(), DimensionError);
  Problem z;
  z.add_block(0);
  CHECK_THROWS_AS(z.validate(), DimensionError);

  const Problem q = load("lqr_dd_scalar_n3.sdp");
  std::stringstream buf;
  write_triplets(q, buf);
  const Problem r = read_triplets(buf);
  CHECK(r.block_dims == q.block_dims);
  CHECK(r.num_constraints() == q.num_constraints());
  CHECK(r.num_free == q.num_free);
  CHECK(solve(r).objective == doctest::Approx(solve(q).objective).epsilon(1e-14));

  std::stringstream garbage("ddlqr-sdp 2\n");
  CHECK_THROWS_AS(read_triplets(garbage), IoError);
  std::stringstream truncated("ddlqr-sdp 1\n1 1 0\n2\n1\n0\n0 1 1 1 x\n");
  CHECK_THROWS_AS(read_triplets(truncated), IoError);
}

TEST_CASE("linear forms name symmetric entries once") {
  Problem p;
  p.add_block(2);
  LinearForm f;
  f.add_entry(0, 1, 0, 1.0).add_entry(0, 0, 1, 1.0).add_constant(-2.0);  // 2·X12 = 2
  p.constraints.push_back(f.equals_zero());
  LinearForm obj;
  obj.add_entry(0, 0, 0, 1.0).add_entry(0, 1, 1, 1.0);
  obj.add_to_objective(p);
  const Solution s = solve(p);
  CHECK(s.status == Status::optimal);
  CHECK(s.X[0](0, 1) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-7));
}
