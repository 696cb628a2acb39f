#include <cmath>
#include <vector>

#include "doctest.h"

#include "ddlqr/bench.hpp"
#include "ddlqr/errors.hpp"
#include "ddlqr/riccati.hpp"

using namespace ddlqr;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

// Reference values for the batch reactor with Qx = Qf = I, R = I, computed
// independently with scipy.linalg.solve_discrete_are and a numpy recursion.
const Matrix kReactorDareP{
    {14.222743077543843, -0.13642962802533398, 8.148676219105162, -6.847174248818831},
    {-0.13642962802533398, 2.0434325303124456, 0.22169262292107383, 1.0547265297054138},
    {8.148676219105162, 0.22169262292107383, 6.409751508078667, -3.807027987345978},
    {-6.847174248818831, 1.0547265297054138, -3.807027987345978, 6.450310480023067}};
const Matrix kReactorDareK{
    {0.06368898911261889, -0.7055541288670404, -0.15640706573066537, -0.6699846388836684},
    {2.1491902954432893, 0.08816970939662092, 1.4900496850821756, -0.979787475909018}};
const Matrix kReactorK0N10{
    {0.06079333266937795, -0.7054706842982307, -0.1583056164080286, -0.6682614339564689},
    {2.1131497710651375, 0.08908901911135736, 1.466426805051078, -0.9584370867909932}};
constexpr double kReactorCostN10 = 218.11510816413175;

}  // namespace

TEST_CASE("scalar recursion by hand") {
  const LtiSystem sys(scalar(1), scalar(1));
  const CostWeights w = CostWeights::identity(1, 1, 1);
  const RiccatiSolution r = riccati_recursion(sys, w);
  REQUIRE(r.P.size() == 2);
  REQUIRE(r.K.size() == 1);
  CHECK(r.P[1](0, 0) == 1.0);
  CHECK(r.K[0](0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(r.P[0](0, 0) == doctest::Approx(1.5).epsilon(1e-15));

  const CovarianceSequence cov = covariance_recursion(sys, r.K);
  CHECK(cov.S[1](0, 0) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(cov.U[0](0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(expected_cost(w, cov) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("degenerate weights and inputs") {
  Rng rng(1);
  const LtiSystem sys = random_system(3, 2, rng);
  const LtiSystem no_input(sys.A(), Matrix::Zero(3, 2));
  for (const Matrix& K : riccati_recursion(no_input, CostWeights::identity(3, 2, 5)).K) CHECK(K.isZero());

  const CostWeights zero(Matrix::Zero(3, 3), Matrix::Zero(3, 3), Matrix::Identity(2, 2), 5);
  const RiccatiSolution r = riccati_recursion(sys, zero);
  for (const Matrix& P : r.P) CHECK(P.isZero());
  for (const Matrix& K : r.K) CHECK(K.isZero());
  CHECK(expected_cost(zero, covariance_recursion(sys, r.K)) == 0.0);
}

TEST_CASE("recursion invariants") {
  Rng rng(2);
  const LtiSystem sys = random_system(4, 2, rng);
  const CostWeights w = CostWeights::identity(4, 2, 12);
  const RiccatiSolution r = riccati_recursion(sys, w);
  CHECK(r.P.back() == w.Qf());
  for (const Matrix& P : r.P) {
    CHECK(asymmetry(P) <= 1e-10);
    CHECK(min_eigenvalue(P) >= -1e-10);
  }

  SUBCASE("Bellman consistency") {
    for (int i = 0; i < 10; ++i) {
      const Vector x0 = rng.normal_vector(4);
      const double v = x0.dot(r.P[0] * x0);
      CHECK(std::abs(deterministic_cost(sys, w, x0, r.K) - v) <= 1e-9 * v);
    }
  }
  SUBCASE("stochastic value equals the sum of traces") {
    const CovarianceSequence cov = covariance_recursion(sys, r.K);
    double traces = 0.0;
    for (const Matrix& P : r.P) traces += P.trace();
    CHECK(std::abs(expected_cost(w, cov) - traces) <= 1e-8 * traces);
    for (int k = 0; k < cov.horizon(); ++k) {
      CHECK(min_eigenvalue(cov.S[static_cast<std::size_t>(k)]) >= 1.0 - 1e-12);
      Matrix V(6, 6);
      V << cov.S[static_cast<std::size_t>(k)], cov.Y[static_cast<std::size_t>(k)],
          cov.Y[static_cast<std::size_t>(k)].transpose(), cov.U[static_cast<std::size_t>(k)];
      CHECK(min_eigenvalue(V) >= -1e-9 * (1.0 + V.norm()));
    }
  }
  SUBCASE("gains are optimal under perturbation") {
    const double best = expected_cost(w, covariance_recursion(sys, r.K));
    for (int i = 0; i < 100; ++i) {
      std::vector<Matrix> K = r.K;
      K[static_cast<std::size_t>(i % 12)] += 1e-3 * rng.normal_matrix(2, 4);
      CHECK(expected_cost(w, covariance_recursion(sys, K)) >= best);
      const Vector x0 = rng.normal_vector(4);
      CHECK(deterministic_cost(sys, w, x0, r.K) <= deterministic_cost(sys, w, x0, K) + 1e-12);
    }
  }
}

TEST_CASE("cost evaluation edge cases") {
  const LtiSystem sys(scalar(1), scalar(1));
  const CostWeights w(scalar(1), scalar(1), scalar(7), 2);
  const std::vector<Matrix> zero(2, scalar(0));
  CHECK(deterministic_cost(sys, w, Vector::Constant(1, 1.0), zero) == 3.0);
  CHECK(deterministic_cost(sys, w, Vector::Zero(1), zero) == 0.0);
  CHECK_THROWS_AS(deterministic_cost(sys, w, Vector::Zero(1), std::vector<Matrix>(1, scalar(0))), DimensionError);

  const CovarianceSequence none = covariance_recursion(sys, std::vector<Matrix>{});
  CHECK(none.S.size() == 1);
  CHECK(none.S[0] == scalar(1));

  // Unstable scalar plant: zero feedback costs more than the optimal gains.
  const LtiSystem unstable(scalar(2), scalar(1));
  const CostWeights w5 = CostWeights::identity(1, 1, 5);
  const double opt = expected_cost(w5, covariance_recursion(unstable, riccati_recursion(unstable, w5).K));
  CHECK(expected_cost(w5, covariance_recursion(unstable, std::vector<Matrix>(5, scalar(0)))) > opt);
}

TEST_CASE("DARE fixed point") {
  SUBCASE("golden ratio") {
    const DareSolution d = dare_fixed_point(LtiSystem(scalar(1), scalar(1)), scalar(1), scalar(1));
    CHECK(std::abs(d.P(0, 0) - (1.0 + std::sqrt(5.0)) / 2.0) <= 1e-10);
    CHECK(std::abs(d.K(0, 0) + (std::sqrt(5.0) - 1.0) / 2.0) <= 1e-10);
  }
  SUBCASE("A = 0 collapses to Qx") {
    const Matrix Q{{2, 0.5}, {0.5, 1}};
    const DareSolution d = dare_fixed_point(LtiSystem(Matrix::Zero(2, 2), Matrix::Identity(2, 2)), Q, Matrix::Identity(2, 2));
    CHECK((d.P - Q).norm() == 0.0);
    CHECK(d.K.isZero());
  }
  SUBCASE("batch reactor") {
    const LtiSystem sys = bench::reactor_system();
    const DareSolution d = dare_fixed_point(sys, Matrix::Identity(4, 4), Matrix::Identity(2, 2));
    CHECK((d.P - kReactorDareP).norm() <= 1e-9);
    CHECK((d.K - kReactorDareK).norm() <= 1e-9);
    CHECK(spectral_radius(closed_loop(sys, d.K)) < 1.0);

    // K(0) approaches the stationary gain as the horizon grows.
    double prev = 1e300;
    for (int N : {5, 10, 20, 30}) {
      const double e = (riccati_recursion(sys, CostWeights::identity(4, 2, N)).K[0] - d.K).norm();
      CHECK(e <= prev);
      prev = e;
    }
  }
  SUBCASE("iteration cap") {
    DareOptions opts;
    opts.max_iterations = 2;
    CHECK_THROWS_AS(dare_fixed_point(bench::reactor_system(), Matrix::Identity(4, 4), Matrix::Identity(2, 2), opts),
                    ConvergenceError);
  }
}

TEST_CASE("reactor finite horizon reference") {
  const LtiSystem sys = bench::reactor_system();
  const CostWeights w = CostWeights::identity(4, 2, 10);
  const RiccatiSolution r = riccati_recursion(sys, w);
  CHECK((r.K[0] - kReactorK0N10).norm() <= 1e-10);
  CHECK(std::abs(expected_cost(w, covariance_recursion(sys, r.K)) - kReactorCostN10) <= 1e-9);
}
