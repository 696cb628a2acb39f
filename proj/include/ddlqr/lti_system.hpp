#pragma once

#include <span>
#include <vector>

#include "ddlqr/linalg.hpp"
#include "ddlqr/rng.hpp"

namespace ddlqr {

/// Discrete-time pair x(k+1) = A x(k) + B u(k).
class LtiSystem {
 public:
  /// Throws DimensionError on non-conforming shapes or empty dimensions and
  /// std::invalid_argument on non-finite entries.
  LtiSystem(Matrix A, Matrix B);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  int n() const { return static_cast<int>(A_.rows()); }
  int m() const { return static_cast<int>(B_.cols()); }

 private:
  Matrix A_;
  Matrix B_;
};

/// Quadratic cost weights and horizon.
///
/// Qx and Qf must be PSD, R must be PD. Inputs that are symmetric up to
/// rounding are symmetrized; clearly asymmetric inputs are rejected.
class CostWeights {
 public:
  CostWeights(Matrix Qx, Matrix Qf, Matrix R, int horizon);

  /// Qx = Qf = I_n, R = I_m.
  static CostWeights identity(int n, int m, int horizon);

  const Matrix& Qx() const { return Qx_; }
  const Matrix& Qf() const { return Qf_; }
  const Matrix& R() const { return R_; }
  int horizon() const { return horizon_; }
  int n() const { return static_cast<int>(Qx_.rows()); }
  int m() const { return static_cast<int>(R_.rows()); }

  CostWeights scaled(double alpha) const;
  CostWeights with_horizon(int horizon) const;

  /// Throws DimensionError if the weights do not match the system.
  void check_conforms(const LtiSystem& sys) const;

 private:
  Matrix Qx_;
  Matrix Qf_;
  Matrix R_;
  int horizon_;
};

/// states has one more entry than inputs.
struct Trajectory {
  std::vector<Vector> states;
  std::vector<Vector> inputs;

  int length() const { return static_cast<int>(inputs.size()); }
};

Trajectory simulate(const LtiSystem& sys, const Vector& x0, std::span<const Vector> inputs);

/// Simulates u(k) = K(k) x(k) for k = 0..gains.size()-1.
Trajectory simulate_feedback(const LtiSystem& sys, const Vector& x0, std::span<const Matrix> gains);

/// [B, AB, ..., A^{n-1}B].
Matrix controllability_matrix(const LtiSystem& sys);

bool is_controllable(const LtiSystem& sys);

inline constexpr int kControllabilityRetryCap = 100;

/// I.i.d. standard normal A and B, redrawn until controllable.
LtiSystem random_system(int n, int m, Rng& rng);

/// A + B K.
Matrix closed_loop(const LtiSystem& sys, const Matrix& K);

}  // namespace ddlqr
