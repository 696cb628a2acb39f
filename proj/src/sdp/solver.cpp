#include "ddlqr/sdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "sdp/operator.hpp"
#include "sdp/presolve.hpp"

namespace ddlqr::sdp {

const char* status_name(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::max_iters: return "max_iters";
    case Status::infeasible_suspected: return "infeasible_suspected";
  }
  return "unknown";
}

namespace {

using detail::DenseRow;
using detail::Operator;
using Blocks = std::vector<Matrix>;

Blocks scaled_identity(const std::vector<int>& dims, double tau) {
  Blocks out;
  for (int d : dims) out.push_back(tau * Matrix::Identity(d, d));
  return out;
}

// Nesterov-Todd scaling: X = G D Gᵀ and Z = G⁻ᵀ D G⁻¹ with D diagonal.
// Computed from Cholesky factors and an SVD, never from matrix square roots
// of X or Z.
struct NtScaling {
  Blocks G;
  std::vector<Vector> d;
};

bool nt_scaling(const Blocks& X, const Blocks& Z, NtScaling& out) {
  out.G.resize(X.size());
  out.d.resize(X.size());
  for (std::size_t b = 0; b < X.size(); ++b) {
    Eigen::LLT<Matrix> lx(X[b]), lz(Z[b]);
    if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const Matrix Lx = lx.matrixL();
    const Matrix Lz = lz.matrixL();
    Eigen::JacobiSVD<Matrix> svd(Lz.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    if (s.minCoeff() <= 0.0 || !s.allFinite()) return false;
    out.G[b] = Lx * svd.matrixV() * s.cwiseSqrt().cwiseInverse().asDiagonal();
    out.d[b] = s;
  }
  return true;
}

Blocks congruence(const Blocks& M, const Blocks& G) {
  Blocks out(M.size());
  for (std::size_t b = 0; b < M.size(); ++b) out[b] = symmetrize(G[b].transpose() * M[b] * G[b]);
  return out;
}

// Largest α ≤ 1, scaled by `fraction`, keeping D + α·dV positive definite.
double step_to_boundary(const std::vector<Vector>& d, const Blocks& dV, double fraction) {
  double alpha = 1.0;
  for (std::size_t b = 0; b < d.size(); ++b) {
    const Vector r = d[b].cwiseSqrt().cwiseInverse();
    const Matrix W = r.asDiagonal() * dV[b] * r.asDiagonal();
    const double lmin = min_eigenvalue(symmetrize(W));
    if (lmin < 0.0) alpha = std::min(alpha, -fraction / lmin);
  }
  return alpha;
}

// Packed symmetric storage with √2 on off-diagonal entries, so that
// ⟨A, B⟩ = svec(A)·svec(B).
Eigen::Index svec_size(const std::vector<int>& dims) {
  Eigen::Index n = 0;
  for (int d : dims) n += static_cast<Eigen::Index>(d) * (d + 1) / 2;
  return n;
}

void svec_into(const Matrix& M, double* out) {
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    *out++ = M(j, j);
    for (Eigen::Index i = j + 1; i < M.rows(); ++i) *out++ = r2 * M(i, j);
  }
}

Blocks unsvec(const std::vector<int>& dims, const Vector& v) {
  const double r2 = std::sqrt(2.0);
  Blocks out;
  const double* p = v.data();
  for (int d : dims) {
    Matrix M(d, d);
    for (int j = 0; j < d; ++j) {
      M(j, j) = *p++;
      for (int i = j + 1; i < d; ++i) M(i, j) = M(j, i) = *p++ / r2;
    }
    out.push_back(std::move(M));
  }
  return out;
}

// Solves Ã Ãᵀ dy = e and returns dy together with w = Ãᵀ dy.
//
// The default path factors M = Ã Ãᵀ by LDLᵀ. When M is badly conditioned
// (typical close to the optimum) the solver switches to a QR factorization
// of Ãᵀ, whose accuracy depends on cond(Ã) rather than cond(Ã)²; w is then
// formed as Q R⁻ᵀ e without going through dy.
class NormalSolver {
 public:
  NormalSolver(const Operator& sop, const std::vector<DenseRow>& srows, const std::vector<int>& dims)
      : sop_(sop), dims_(dims) {
    const Eigen::Index m = sop.rows();
    if (m == 0) return;
    ldlt_.compute(sop.gram());
    const Vector d = ldlt_.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.minCoeff();
    if (ldlt_.info() == Eigen::Success && dmin > kQrSwitch * dmax) return;

    use_qr_ = true;
    std::vector<Eigen::Index> offset(dims.size() + 1, 0);
    for (std::size_t b = 0; b < dims.size(); ++b)
      offset[b + 1] = offset[b] + static_cast<Eigen::Index>(dims[b]) * (dims[b] + 1) / 2;
    Matrix At = Matrix::Zero(svec_size(dims), m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (const detail::BlockTerm& t : srows[static_cast<std::size_t>(i)].terms)
        svec_into(t.mat, At.col(i).data() + offset[static_cast<std::size_t>(t.block)]);
    qr_.compute(At);
  }

  std::pair<Vector, Blocks> solve(const Vector& e) const {
    const Eigen::Index m = e.size();
    if (m == 0) return {Vector(), unsvec(dims_, Vector::Zero(svec_size(dims_)))};
    if (!use_qr_) {
      Vector dy = ldlt_.solve(e);
      return {dy, sop_.adjoint(dy)};
    }
    const auto R = qr_.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    const Vector z = R.transpose().solve(e);
    Vector full = Vector::Zero(qr_.rows());
    full.head(m) = z;
    const Vector w = qr_.householderQ() * full;
    return {R.solve(z), unsvec(dims_, w)};
  }

 private:
  static constexpr double kQrSwitch = 1e-10;
  const Operator& sop_;
  const std::vector<int>& dims_;
  Eigen::LDLT<Matrix> ldlt_;
  Eigen::HouseholderQR<Matrix> qr_;
  bool use_qr_ = false;
};

struct ScaledDirection {
  Blocks dX;  // scaled
  Vector dy;
};

// Solves, in the NT-scaled space where X̃ = Z̃ = D,
//   Ã(dX̃) = r_p,  Ãᵀ(dy) + dZ̃ = R̃_d,  sym((dX̃ + dZ̃) D) = Rc.
ScaledDirection scaled_direction(const Operator& sop, const NormalSolver& M, const std::vector<Vector>& d,
                                 const Blocks& Rd_s, const Vector& rp, const Blocks& Rc) {
  const std::size_t p = d.size();
  Blocks V(p);
  for (std::size_t b = 0; b < p; ++b) {
    const Eigen::Index n = d[b].size();
    V[b].resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) V[b](i, j) = 2.0 * Rc[b](i, j) / (d[b](i) + d[b](j));
    V[b] -= Rd_s[b];
  }
  auto [dy, w] = M.solve(rp - sop.apply(V));
  ScaledDirection out;
  out.dy = std::move(dy);
  out.dX.resize(p);
  for (std::size_t b = 0; b < p; ++b) out.dX[b] = V[b] + w[b];
  return out;
}

// dZ = R_d - Aᵀ dy, so that the dual residual shrinks exactly by (1 - α).
Blocks dual_step(const Operator& op, const Blocks& Rd, const Vector& dy) {
  Blocks out(Rd.size());
  const Blocks ATdy = op.adjoint(dy);
  for (std::size_t i = 0; i < Rd.size(); ++i) out[i] = Rd[i] - ATdy[i];
  return out;
}

double norm_of(const Blocks& B) { return B.empty() ? 0.0 : detail::frobenius(B); }

}  // namespace

Solution solve(const Problem& prob, const Options& opts) {
  const detail::Presolved pre = detail::presolve(prob, opts.presolve_rank_tol);
  Solution sol;
  sol.warnings = pre.warnings;
  const std::size_t p = pre.dims.size();
  const int m = static_cast<int>(pre.rows.size());

  if (pre.inconsistent || pre.unbounded) {
    sol.status = Status::infeasible_suspected;
    sol.warnings.push_back(pre.inconsistent ? "linear equality constraints are inconsistent"
                                            : "objective is unbounded along the free variables");
    sol.X = scaled_identity(pre.dims, 0.0);
    sol.Z = scaled_identity(pre.dims, 0.0);
    sol.y = Vector::Zero(prob.num_constraints());
    sol.free = Vector::Zero(prob.num_free);
    sol.gap = std::numeric_limits<double>::infinity();
    sol.primal_infeas = sol.dual_infeas = std::numeric_limits<double>::infinity();
    return sol;
  }

  const Operator op(pre.dims, pre.rows);
  Vector b(m);
  for (int i = 0; i < m; ++i) b(i) = pre.rows[static_cast<std::size_t>(i)].rhs;
  const Blocks& C = pre.C;

  if (p == 0) {
    // Only free variables: the presolve has already determined them.
    sol.y = detail::lift_dual(pre, Vector::Zero(m));
    sol.free = detail::recover_free(prob, pre, sol.X);
    sol.objective = sol.dual_objective = pre.offset;
    sol.status = Status::optimal;
    return sol;
  }

  int n_total = 0;
  for (int d : pre.dims) n_total += d;
  const double norm_b = b.norm();
  const double norm_C = norm_of(C);
  const double tau = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);

  Blocks X = scaled_identity(pre.dims, tau);
  Blocks Z = scaled_identity(pre.dims, tau);
  Vector y = Vector::Zero(m);

  struct Snapshot {
    Blocks X, Z;
    Vector y;
    double merit = std::numeric_limits<double>::infinity();
  } best;

  Status status = Status::max_iters;
  int stalled = 0;
  int iter = 0;
  const double blowup = 1e12 * (1.0 + norm_b + norm_C + tau);

  for (;; ++iter) {
    const Vector rp = b - op.apply(X);
    const Blocks ATy = op.adjoint(y);
    Blocks Rd(p);
    for (std::size_t i = 0; i < p; ++i) Rd[i] = C[i] - ATy[i] - Z[i];

    const double pobj = detail::inner(C, X) + pre.offset;
    const double dobj = b.dot(y) + pre.offset;
    const double xz = detail::inner(X, Z);
    const double pinf = rp.norm() / (1.0 + norm_b);
    const double dinf = norm_of(Rd) / (1.0 + norm_C);
    const double gap = std::max(std::abs(pobj - dobj), xz) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double merit = std::max({pinf, dinf, gap});

    if (merit < best.merit) best = {X, Z, y, merit};

    if (opts.record_history) {
      IterateRecord rec;
      rec.iteration = iter;
      rec.primal_obj = pobj;
      rec.dual_obj = dobj;
      rec.complementarity = xz;
      rec.residual_correction = detail::inner(Rd, X) - y.dot(rp);
      rec.primal_infeas = pinf;
      rec.dual_infeas = dinf;
      sol.history.push_back(rec);
    }

    if (pinf <= opts.tol_feas && dinf <= opts.tol_feas && gap <= opts.tol_gap) {
      status = Status::optimal;
      break;
    }
    if (iter >= opts.max_iters) break;
    if (!std::isfinite(merit) || norm_of(X) > blowup || norm_of(Z) > blowup) {
      status = Status::infeasible_suspected;
      sol.warnings.push_back("iterates diverged at iteration " + std::to_string(iter));
      break;
    }

    NtScaling nt;
    if (!nt_scaling(X, Z, nt)) {
      sol.warnings.push_back("lost positive definiteness at iteration " + std::to_string(iter));
      break;
    }
    const std::vector<DenseRow> srows = op.congruence(nt.G);
    const Operator sop(pre.dims, srows);
    const NormalSolver M(sop, srows, pre.dims);
    const Blocks Rd_s = congruence(Rd, nt.G);
    const double mu = xz / n_total;

    // Predictor.
    Blocks Rc(p);
    for (std::size_t i = 0; i < p; ++i) Rc[i] = -Matrix(nt.d[i].array().square().matrix().asDiagonal());
    const ScaledDirection aff = scaled_direction(sop, M, nt.d, Rd_s, rp, Rc);
    const Blocks aff_dZ = congruence(dual_step(op, Rd, aff.dy), nt.G);
    const double ap = step_to_boundary(nt.d, aff.dX, 1.0);
    const double ad = step_to_boundary(nt.d, aff_dZ, 1.0);
    double mu_aff = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const Matrix D = nt.d[i].asDiagonal();
      mu_aff += ((D + ap * aff.dX[i]).cwiseProduct(D + ad * aff_dZ[i])).sum();
    }
    mu_aff /= n_total;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector.
    for (std::size_t i = 0; i < p; ++i) {
      Rc[i].diagonal().array() += sigma * mu;
      Rc[i] -= symmetrize(aff.dX[i] * aff_dZ[i]);
    }
    const ScaledDirection dir = scaled_direction(sop, M, nt.d, Rd_s, rp, Rc);
    const Blocks dZ = dual_step(op, Rd, dir.dy);
    const double alpha_p = step_to_boundary(nt.d, dir.dX, opts.step_fraction);
    const double alpha_d = step_to_boundary(nt.d, congruence(dZ, nt.G), opts.step_fraction);

    if (opts.record_history) {
      sol.history.back().step_primal = alpha_p;
      sol.history.back().step_dual = alpha_d;
    }
    for (std::size_t i = 0; i < p; ++i) {
      X[i] = symmetrize(X[i] + alpha_p * (nt.G[i] * dir.dX[i] * nt.G[i].transpose()));
      Z[i] = symmetrize(Z[i] + alpha_d * dZ[i]);
    }
    if (m > 0) y += alpha_d * dir.dy;

    stalled = (std::min(alpha_p, alpha_d) < 1e-8) ? stalled + 1 : 0;
    if (stalled >= 5) {
      sol.warnings.push_back("step lengths collapsed at iteration " + std::to_string(iter));
      ++iter;
      break;
    }
  }

  if (status != Status::optimal) {
    X = best.X;
    Z = best.Z;
    y = best.y;
  }
  const Vector rp = b - op.apply(X);
  const Blocks ATy = op.adjoint(y);
  Blocks Rd(p);
  for (std::size_t i = 0; i < p; ++i) Rd[i] = C[i] - ATy[i] - Z[i];
  sol.objective = detail::inner(C, X) + pre.offset;
  sol.dual_objective = b.dot(y) + pre.offset;
  sol.primal_infeas = rp.norm() / (1.0 + norm_b);
  sol.dual_infeas = norm_of(Rd) / (1.0 + norm_C);
  sol.gap = std::max(std::abs(sol.objective - sol.dual_objective), detail::inner(X, Z)) /
            (1.0 + std::abs(sol.objective) + std::abs(sol.dual_objective));
  sol.status = status;
  sol.iterations = iter;
  sol.free = detail::recover_free(prob, pre, X);
  sol.y = detail::lift_dual(pre, y);
  sol.X = std::move(X);
  sol.Z = std::move(Z);
  return sol;
}

}  // namespace ddlqr::sdp
