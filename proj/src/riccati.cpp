#include "ddlqr/riccati.hpp"

#include <string>

#include <Eigen/Cholesky>

#include "ddlqr/errors.hpp"

namespace ddlqr {
namespace {

struct RiccatiStep {
  Matrix P;
  Matrix K;
};

// One backward step from P(k+1). Uses a PD factorization of R + BᵀPB.
RiccatiStep riccati_step(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R,
                         const Matrix& P_next) {
  const Matrix BtP = B.transpose() * P_next;
  Eigen::LLT<Matrix> llt(symmetrize(R + BtP * B));
  if (llt.info() != Eigen::Success) throw DefinitenessError("riccati: R + BᵀPB is not positive definite");
  RiccatiStep step;
  step.K = -llt.solve(BtP * A);
  step.P = symmetrize(Qx + A.transpose() * P_next * A + A.transpose() * BtP.transpose() * step.K);
  return step;
}

void check_gains(const LtiSystem& sys, std::span<const Matrix> gains) {
  for (const Matrix& K : gains)
    if (K.rows() != sys.m() || K.cols() != sys.n()) throw DimensionError("gain must be m x n");
}

}  // namespace

RiccatiSolution riccati_recursion(const LtiSystem& sys, const CostWeights& w) {
  w.check_conforms(sys);
  const int N = w.horizon();
  RiccatiSolution sol;
  sol.P.resize(static_cast<std::size_t>(N) + 1);
  sol.K.resize(static_cast<std::size_t>(N));
  sol.P[static_cast<std::size_t>(N)] = w.Qf();
  for (int k = N - 1; k >= 0; --k) {
    auto step = riccati_step(sys.A(), sys.B(), w.Qx(), w.R(), sol.P[static_cast<std::size_t>(k) + 1]);
    sol.P[static_cast<std::size_t>(k)] = std::move(step.P);
    sol.K[static_cast<std::size_t>(k)] = std::move(step.K);
  }
  return sol;
}

DareSolution dare_fixed_point(const LtiSystem& sys, const Matrix& Qx, const Matrix& R, const DareOptions& opts) {
  if (Qx.rows() != sys.n() || Qx.cols() != sys.n() || R.rows() != sys.m() || R.cols() != sys.m())
    throw DimensionError("dare_fixed_point: weights do not match the system");
  Matrix P = symmetrize(Qx);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    auto step = riccati_step(sys.A(), sys.B(), Qx, R, P);
    const double change = (step.P - P).norm();
    const bool converged = change <= opts.tolerance * (1.0 + P.norm());
    P = std::move(step.P);
    if (converged) {
      DareSolution sol;
      sol.K = riccati_step(sys.A(), sys.B(), Qx, R, P).K;
      sol.P = std::move(P);
      sol.iterations = it;
      return sol;
    }
  }
  throw ConvergenceError("dare_fixed_point: no convergence within " + std::to_string(opts.max_iterations) +
                         " iterations");
}

CovarianceSequence covariance_recursion(const LtiSystem& sys, std::span<const Matrix> gains) {
  check_gains(sys, gains);
  const int n = sys.n();
  CovarianceSequence cov;
  cov.S.push_back(Matrix::Identity(n, n));
  for (const Matrix& K : gains) {
    const Matrix& S = cov.S.back();
    Matrix Yt = K * S;  // Y(k)ᵀ = K(k) S(k)
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success) throw DefinitenessError("covariance_recursion: S(k) is singular");
    Matrix U = symmetrize(Yt * llt.solve(Yt.transpose()));
    const Matrix Acl = closed_loop(sys, K);
    Matrix S_next = symmetrize(Acl * S * Acl.transpose() + Matrix::Identity(n, n));
    cov.Y.push_back(Yt.transpose());
    cov.U.push_back(std::move(U));
    cov.S.push_back(std::move(S_next));
  }
  return cov;
}

double expected_cost(const CostWeights& w, const CovarianceSequence& cov) {
  if (cov.S.size() != cov.U.size() + 1) throw DimensionError("expected_cost: S must have one more entry than U");
  const std::size_t N = cov.U.size();
  if (cov.S.front().rows() != w.n() || (N > 0 && cov.U.front().rows() != w.m()))
    throw DimensionError("expected_cost: covariances do not match the weights");
  double J = (w.Qf() * cov.S[N]).trace();
  for (std::size_t k = 0; k < N; ++k) J += (w.Qx() * cov.S[k]).trace() + (w.R() * cov.U[k]).trace();
  return J;
}

double deterministic_cost(const LtiSystem& sys, const CostWeights& w, const Vector& x0,
                          std::span<const Matrix> gains) {
  w.check_conforms(sys);
  check_gains(sys, gains);
  if (static_cast<int>(gains.size()) != w.horizon())
    throw DimensionError("deterministic_cost: need one gain per step of the horizon");
  const Trajectory traj = simulate_feedback(sys, x0, gains);
  double J = traj.states.back().dot(w.Qf() * traj.states.back());
  for (std::size_t k = 0; k < traj.inputs.size(); ++k) {
    J += traj.states[k].dot(w.Qx() * traj.states[k]) + traj.inputs[k].dot(w.R() * traj.inputs[k]);
  }
  return J;
}

}  // namespace ddlqr
