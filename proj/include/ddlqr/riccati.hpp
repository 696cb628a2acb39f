#pragma once

#include <span>
#include <vector>

#include "ddlqr/linalg.hpp"
#include "ddlqr/lti_system.hpp"

namespace ddlqr {

/// Backward Riccati sweep. P has N+1 entries (P[N] = Qf), K has N.
struct RiccatiSolution {
  std::vector<Matrix> P;
  std::vector<Matrix> K;
};

/// Finite-horizon LQR by the difference Riccati equation
///   K(k) = -(R + BᵀP(k+1)B)⁻¹ BᵀP(k+1)A
///   P(k) = Qx + AᵀP(k+1)A + AᵀP(k+1)B K(k)
RiccatiSolution riccati_recursion(const LtiSystem& sys, const CostWeights& w);

struct DareOptions {
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

struct DareSolution {
  Matrix P;
  Matrix K;
  int iterations = 0;
};

/// Stabilizing DARE solution as the fixed point of the Riccati recursion,
/// started from P = Qx. Stops when ‖ΔP‖_F <= tol·(1 + ‖P‖_F); throws
/// ConvergenceError at the iteration cap.
DareSolution dare_fixed_point(const LtiSystem& sys, const Matrix& Qx, const Matrix& R,
                              const DareOptions& opts = {});

/// State covariance S(0..N), input covariance U(0..N-1) and cross
/// covariance Y(0..N-1) of the closed loop x(k+1) = (A + B K(k)) x(k) + w(k)
/// with x(0), w(k) ~ N(0, I).
struct CovarianceSequence {
  std::vector<Matrix> S;
  std::vector<Matrix> U;
  std::vector<Matrix> Y;

  int horizon() const { return static_cast<int>(U.size()); }
};

CovarianceSequence covariance_recursion(const LtiSystem& sys, std::span<const Matrix> gains);

/// Tr(Qf S(N)) + Σ Tr(Qx S(k) + R U(k)).
double expected_cost(const CostWeights& w, const CovarianceSequence& cov);

/// x(N)ᵀQf x(N) + Σ x(k)ᵀQx x(k) + u(k)ᵀR u(k) along u(k) = K(k) x(k).
double deterministic_cost(const LtiSystem& sys, const CostWeights& w, const Vector& x0,
                          std::span<const Matrix> gains);

}  // namespace ddlqr
