#pragma once

#include <string>
#include <vector>

#include "ddlqr/linalg.hpp"
#include "ddlqr/sdp/problem.hpp"

namespace ddlqr::sdp {

enum class Status { optimal, max_iters, infeasible_suspected };

const char* status_name(Status s);

struct Options {
  double tol_gap = 1e-8;   ///< relative duality gap
  double tol_feas = 1e-8;  ///< relative primal and dual residuals
  int max_iters = 200;
  double step_fraction = 0.99;  ///< fraction of the step to the PSD boundary
  /// Relative singular-value cutoff used when eliminating free variables.
  double presolve_rank_tol = 1e-11;
  bool record_history = false;
};

/// Per-iterate record, in the solver's internal (presolved) problem.
/// primal_obj - dual_obj = complementarity + residual_correction holds
/// exactly, with residual_correction = ⟨R_d, X⟩ - yᵀr_p vanishing once the
/// iterate is feasible.
struct IterateRecord {
  int iteration = 0;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double complementarity = 0.0;  ///< ⟨X, Z⟩
  double residual_correction = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
};

struct Solution {
  std::vector<Matrix> X;
  std::vector<Matrix> Z;
  Vector y;
  Vector free;  ///< values of the free scalar variables

  double objective = 0.0;       ///< primal objective, offset included
  double dual_objective = 0.0;  ///< dual objective, offset included
  Status status = Status::max_iters;
  double gap = 0.0;            ///< relative duality gap at the returned iterate
  double primal_infeas = 0.0;  ///< relative, in the presolved problem
  double dual_infeas = 0.0;
  int iterations = 0;

  std::vector<IterateRecord> history;
  std::vector<std::string> warnings;
};

/// Infeasible-start primal-dual path-following method on dense blocks:
/// Nesterov-Todd scaling, Mehrotra predictor-corrector. Newton systems are
/// solved through the Schur complement, or through a QR factorization of
/// the scaled constraint matrix once the Schur complement becomes badly
/// conditioned.
///
/// A presolve rescales constraint rows to unit norm, eliminates free
/// variables (minimum-norm recovery) and drops linearly dependent rows.
/// The returned y is the multiplier vector of the original constraints.
Solution solve(const Problem& prob, const Options& opts = {});

struct KktReport {
  double primal_feas = 0.0;      ///< ‖b - A(X) - Fx‖ / (1 + ‖b‖)
  double dual_feas = 0.0;        ///< ‖(C - Aᵀy - Z, c - Fᵀy)‖ / (1 + ‖C‖ + ‖c‖)
  double complementarity = 0.0;  ///< ⟨X, Z⟩ / (1 + |pobj| + |dobj|)
  double min_eig_X = 0.0;
  double min_eig_Z = 0.0;
  bool primal_ok = false;
  bool dual_ok = false;
  bool complementarity_ok = false;
  bool psd_ok = false;

  bool ok() const { return primal_ok && dual_ok && complementarity_ok && psd_ok; }
};

/// Checks the KKT conditions of `sol` against the original problem.
KktReport verify_kkt(const Problem& prob, const Solution& sol, double tol);

}  // namespace ddlqr::sdp
