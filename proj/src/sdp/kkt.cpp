#include <algorithm>
#include <cmath>
#include <limits>

#include "ddlqr/errors.hpp"
#include "ddlqr/sdp/solver.hpp"
#include "sdp/operator.hpp"
#include "sdp/presolve.hpp"

namespace ddlqr::sdp {

KktReport verify_kkt(const Problem& prob, const Solution& sol, double tol) {
  prob.validate();
  const std::size_t p = prob.block_dims.size();
  if (sol.X.size() != p || sol.Z.size() != p || sol.y.size() != prob.num_constraints() ||
      sol.free.size() != prob.num_free)
    throw DimensionError("verify_kkt: solution does not match the problem");

  const std::vector<detail::DenseRow> rows = detail::dense_rows(prob);
  const detail::Operator op(prob.block_dims, rows);
  const std::vector<Matrix> C = prob.objective_blocks();
  const Vector c = prob.free_objective_vector();

  Vector b(prob.num_constraints());
  Vector Fx = Vector::Zero(prob.num_constraints());
  Vector FTy = Vector::Zero(prob.num_free);
  for (int i = 0; i < prob.num_constraints(); ++i) {
    const Constraint& con = prob.constraints[static_cast<std::size_t>(i)];
    b(i) = con.rhs;
    for (const auto& [j, f] : con.free_terms) {
      Fx(i) += f * sol.free(j);
      FTy(j) += f * sol.y(i);
    }
  }

  KktReport r;
  r.primal_feas = (b - op.apply(sol.X) - Fx).norm() / (1.0 + b.norm());

  const std::vector<Matrix> ATy = op.adjoint(sol.y);
  double dsq = (c - FTy).squaredNorm();
  double norm_C = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    dsq += (C[i] - ATy[i] - sol.Z[i]).squaredNorm();
    norm_C += C[i].squaredNorm();
  }
  r.dual_feas = std::sqrt(dsq) / (1.0 + std::sqrt(norm_C) + c.norm());

  const double pobj = (p ? detail::inner(C, sol.X) : 0.0) + c.dot(sol.free) + prob.objective_offset;
  const double dobj = b.dot(sol.y) + prob.objective_offset;
  r.complementarity = (p ? detail::inner(sol.X, sol.Z) : 0.0) / (1.0 + std::abs(pobj) + std::abs(dobj));

  r.min_eig_X = r.min_eig_Z = std::numeric_limits<double>::infinity();
  bool psd = true;
  for (std::size_t i = 0; i < p; ++i) {
    const double ex = min_eigenvalue(sol.X[i]);
    const double ez = min_eigenvalue(sol.Z[i]);
    r.min_eig_X = std::min(r.min_eig_X, ex);
    r.min_eig_Z = std::min(r.min_eig_Z, ez);
    psd = psd && ex >= -tol * std::max(1.0, sol.X[i].norm()) && ez >= -tol * std::max(1.0, sol.Z[i].norm());
  }
  if (p == 0) r.min_eig_X = r.min_eig_Z = 0.0;

  r.primal_ok = r.primal_feas <= tol;
  r.dual_ok = r.dual_feas <= tol;
  r.complementarity_ok = std::abs(r.complementarity) <= tol;
  r.psd_ok = psd;
  return r;
}

}  // namespace ddlqr::sdp
