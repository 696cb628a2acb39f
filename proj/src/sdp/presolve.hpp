#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ddlqr/sdp/problem.hpp"
#include "sdp/operator.hpp"

namespace ddlqr::sdp::detail {

/// Free variables coupled through shared rows, eliminated together.
struct FreeGroup {
  std::vector<int> rows;  // original row indices
  std::vector<int> vars;
  Matrix pinv;            // vars x rows, scaled residuals to scaled variables
};

/// Pure-PSD problem equivalent to the original one, plus the data needed to
/// map its solution back.
struct Presolved {
  std::vector<int> dims;
  std::vector<Matrix> C;
  double offset = 0.0;
  std::vector<DenseRow> rows;

  std::vector<DenseRow> original;   // dense form of the original rows
  std::vector<double> row_scale;    // s_j: scaled row = s_j · original row
  std::vector<double> col_scale;    // d_j: free variable j = d_j · scaled variable
  std::vector<std::vector<std::pair<int, double>>> combos;  // reduced row -> Σ w·original row
  Vector dual_shift;                // multiplier contribution of the free objective
  std::vector<FreeGroup> groups;
  int num_free = 0;

  bool inconsistent = false;  // primal infeasible by linear algebra alone
  bool unbounded = false;     // free objective outside the row space
  std::vector<std::string> warnings;
};

Presolved presolve(const Problem& prob, double rank_tol);

/// Multipliers of the original constraints from those of the reduced rows.
Vector lift_dual(const Presolved& pre, const Vector& y_reduced);

/// Minimum-norm free-variable values consistent with the block variable X.
Vector recover_free(const Problem& prob, const Presolved& pre, const std::vector<Matrix>& X);

/// Dense form of a problem's rows: (blocks, free coefficients).
std::vector<DenseRow> dense_rows(const Problem& prob);

}  // namespace ddlqr::sdp::detail
