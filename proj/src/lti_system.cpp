#include "ddlqr/lti_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ddlqr/errors.hpp"

namespace ddlqr {
namespace {

void require_finite(const Matrix& M, const char* what) {
  if (!M.allFinite()) throw std::invalid_argument(std::string(what) + " has non-finite entries");
}

// Accepts rounding-level asymmetry, rejects anything larger.
Matrix symmetric_weight(const Matrix& M, const char* what) {
  if (M.rows() != M.cols() || M.rows() == 0)
    throw DimensionError(std::string(what) + " must be a nonempty square matrix");
  require_finite(M, what);
  const double scale = 1.0 + M.cwiseAbs().maxCoeff();
  if (asymmetry(M) > 1e-8 * scale) throw std::invalid_argument(std::string(what) + " is not symmetric");
  return symmetrize(M);
}

}  // namespace

LtiSystem::LtiSystem(Matrix A, Matrix B) : A_(std::move(A)), B_(std::move(B)) {
  if (A_.rows() < 1 || A_.rows() != A_.cols())
    throw DimensionError("LtiSystem: A must be n x n with n >= 1");
  if (B_.rows() != A_.rows() || B_.cols() < 1)
    throw DimensionError("LtiSystem: B must be n x m with m >= 1");
  require_finite(A_, "A");
  require_finite(B_, "B");
}

CostWeights::CostWeights(Matrix Qx, Matrix Qf, Matrix R, int horizon)
    : Qx_(symmetric_weight(Qx, "Qx")),
      Qf_(symmetric_weight(Qf, "Qf")),
      R_(symmetric_weight(R, "R")),
      horizon_(horizon) {
  if (horizon_ < 1) throw std::invalid_argument("CostWeights: horizon must be positive");
  if (Qf_.rows() != Qx_.rows()) throw DimensionError("CostWeights: Qx and Qf differ in size");
  const auto psd_tol = [](const Matrix& M) { return 1e-10 * std::max(1.0, M.norm()); };
  if (min_eigenvalue(Qx_) < -psd_tol(Qx_)) throw DefinitenessError("Qx is not PSD");
  if (min_eigenvalue(Qf_) < -psd_tol(Qf_)) throw DefinitenessError("Qf is not PSD");
  if (min_eigenvalue(R_) <= 1e-12 * std::max(1.0, R_.norm())) throw DefinitenessError("R is not PD");
}

CostWeights CostWeights::identity(int n, int m, int horizon) {
  return CostWeights(Matrix::Identity(n, n), Matrix::Identity(n, n), Matrix::Identity(m, m), horizon);
}

CostWeights CostWeights::scaled(double alpha) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("CostWeights::scaled: alpha must be positive");
  return CostWeights(alpha * Qx_, alpha * Qf_, alpha * R_, horizon_);
}

CostWeights CostWeights::with_horizon(int horizon) const { return CostWeights(Qx_, Qf_, R_, horizon); }

void CostWeights::check_conforms(const LtiSystem& sys) const {
  if (n() != sys.n() || m() != sys.m())
    throw DimensionError("CostWeights: dimensions do not match the system");
}

Trajectory simulate(const LtiSystem& sys, const Vector& x0, std::span<const Vector> inputs) {
  if (x0.size() != sys.n()) throw DimensionError("simulate: x0 has wrong length");
  Trajectory traj;
  traj.states.reserve(inputs.size() + 1);
  traj.inputs.reserve(inputs.size());
  traj.states.push_back(x0);
  for (const Vector& u : inputs) {
    if (u.size() != sys.m()) throw DimensionError("simulate: input has wrong length");
    traj.states.push_back(sys.A() * traj.states.back() + sys.B() * u);
    traj.inputs.push_back(u);
  }
  return traj;
}

Trajectory simulate_feedback(const LtiSystem& sys, const Vector& x0, std::span<const Matrix> gains) {
  if (x0.size() != sys.n()) throw DimensionError("simulate_feedback: x0 has wrong length");
  Trajectory traj;
  traj.states.push_back(x0);
  for (const Matrix& K : gains) {
    if (K.rows() != sys.m() || K.cols() != sys.n())
      throw DimensionError("simulate_feedback: gain must be m x n");
    Vector u = K * traj.states.back();
    traj.states.push_back(sys.A() * traj.states.back() + sys.B() * u);
    traj.inputs.push_back(std::move(u));
  }
  return traj;
}

Matrix controllability_matrix(const LtiSystem& sys) {
  const int n = sys.n(), m = sys.m();
  Matrix C(n, n * m);
  Matrix block = sys.B();
  for (int i = 0; i < n; ++i) {
    C.middleCols(i * m, m) = block;
    block = sys.A() * block;
  }
  return C;
}

bool is_controllable(const LtiSystem& sys) { return numerical_rank(controllability_matrix(sys)) == sys.n(); }

LtiSystem random_system(int n, int m, Rng& rng) {
  if (n < 1 || m < 1) throw std::invalid_argument("random_system: n and m must be >= 1");
  for (int attempt = 0; attempt < kControllabilityRetryCap; ++attempt) {
    Matrix A = rng.normal_matrix(n, n);
    Matrix B = rng.normal_matrix(n, m);
    LtiSystem sys(std::move(A), std::move(B));
    if (is_controllable(sys)) return sys;
  }
  throw GenerationError("random_system: no controllable pair within the retry cap");
}

Matrix closed_loop(const LtiSystem& sys, const Matrix& K) {
  if (K.rows() != sys.m() || K.cols() != sys.n()) throw DimensionError("closed_loop: K must be m x n");
  return sys.A() + sys.B() * K;
}

}  // namespace ddlqr
