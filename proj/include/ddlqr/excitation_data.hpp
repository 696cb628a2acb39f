#pragma once

#include <span>
#include <vector>

#include "ddlqr/linalg.hpp"
#include "ddlqr/lti_system.hpp"
#include "ddlqr/rng.hpp"

namespace ddlqr {

/// Block Hankel matrix of depth `depth` and `cols` columns starting at
/// `start`: block (r, c) is signal[start + r + c]. Result is (σ·depth) x cols.
Matrix hankel(std::span<const Vector> signal, int start, int depth, int cols);

/// True iff the signal over [0, T-1] is persistently exciting of order
/// `order`: its depth-`order` Hankel matrix has full row rank σ·order.
/// Signals shorter than (σ+1)·order - 1 are rejected without a rank test.
bool pe_order_check(std::span<const Vector> signal, int order);

/// Largest order the signal is persistently exciting of (0 if none).
int pe_order(std::span<const Vector> signal);

/// Input/state data from one experiment of length T.
///
/// U0T = [u(0) .. u(T-1)], X0T = [x(0) .. x(T-1)], X1T = [x(1) .. x(T)].
struct ExperimentRecord {
  Matrix U0T;
  Matrix X0T;
  Matrix X1T;
  Trajectory raw;

  int T() const { return static_cast<int>(U0T.cols()); }
  int n() const { return static_cast<int>(X0T.rows()); }
  int m() const { return static_cast<int>(U0T.rows()); }

  /// Rebuilds a record (and its raw trajectory) from stored data matrices.
  /// Throws DimensionError unless the matrices are shift-consistent.
  static ExperimentRecord from_matrices(Matrix U0T, Matrix X0T, Matrix X1T);
};

ExperimentRecord collect_experiment(const LtiSystem& sys, const Vector& x0, std::span<const Vector> inputs);

/// rank [U0T; X0T] == n + m.
bool rank_condition(const ExperimentRecord& rec);

/// Minimum-norm G with [U0T; X0T] G = [K; I_n]. Throws DataRichnessError
/// when the rank condition fails.
Matrix solve_feedback_parametrization(const ExperimentRecord& rec, const Matrix& K);

/// T i.i.d. standard normal m-vectors.
std::vector<Vector> pe_input(int m, int T, Rng& rng);

}  // namespace ddlqr
