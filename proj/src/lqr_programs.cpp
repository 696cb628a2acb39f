#include "ddlqr/lqr_programs.hpp"

#include <string>

#include <Eigen/Cholesky>

#include "ddlqr/errors.hpp"

namespace ddlqr {

using sdp::LinearForm;

Matrix MatrixSlot::read(const std::vector<Matrix>& X) const {
  Matrix out = X.at(static_cast<std::size_t>(block)).block(row0, col0, rows, cols);
  if (diag_shift != 0.0) out.diagonal().array() += diag_shift;
  return out;
}

const char* mode_name(LqrMode mode) { return mode == LqrMode::model_based ? "mb" : "dd"; }

namespace {

// coef · (slot)[i, j], shift included.
void add_slot(LinearForm& f, const MatrixSlot& s, int i, int j, double coef) {
  f.add_entry(s.block, s.row0 + i, s.col0 + j, coef);
  if (i == j && s.row0 == s.col0) f.add_constant(coef * s.diag_shift);
}

struct Skeleton {
  sdp::Problem prob;
  std::vector<int> state_blocks, input_blocks;
  std::vector<MatrixSlot> S, Z;
};

// Blocks, the covariance slots, the chain S(k) between consecutive blocks,
// S(0) = I, and the objective. Off-diagonal corners are left to the caller.
Skeleton skeleton(int n, int m, const CostWeights& w, double eps) {
  const int N = w.horizon();
  Skeleton sk;
  for (int k = 0; k < N; ++k) {
    sk.state_blocks.push_back(sk.prob.add_block(2 * n));
    sk.input_blocks.push_back(sk.prob.add_block(m + n));
  }
  for (int k = 0; k < N; ++k) sk.S.push_back({sk.state_blocks[static_cast<std::size_t>(k)], n, n, n, n, eps});
  sk.S.push_back({sk.state_blocks.back(), 0, 0, n, n, 1.0 + eps});
  for (int k = 0; k < N; ++k) sk.Z.push_back({sk.input_blocks[static_cast<std::size_t>(k)], 0, 0, m, m, eps});

  auto& cons = sk.prob.constraints;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      LinearForm f;
      add_slot(f, sk.S[0], i, j, 1.0);
      f.add_constant(i == j ? -1.0 : 0.0);
      cons.push_back(f.equals_zero());
    }
  for (int k = 0; k + 1 < N; ++k) {
    const MatrixSlot next{sk.state_blocks[static_cast<std::size_t>(k)], 0, 0, n, n, 1.0 + eps};
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        LinearForm f;
        add_slot(f, next, i, j, 1.0);
        add_slot(f, sk.S[static_cast<std::size_t>(k + 1)], i, j, -1.0);
        cons.push_back(f.equals_zero());
      }
  }
  // The lower-right corner of the input block is S(k) as well.
  for (int k = 0; k < N; ++k) {
    const MatrixSlot s_in{sk.input_blocks[static_cast<std::size_t>(k)], m, m, n, n, eps};
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        LinearForm f;
        add_slot(f, s_in, i, j, 1.0);
        add_slot(f, sk.S[static_cast<std::size_t>(k)], i, j, -1.0);
        cons.push_back(f.equals_zero());
      }
  }

  LinearForm obj;
  auto add_trace = [&](const Matrix& Q, const MatrixSlot& s) {
    for (int i = 0; i < s.rows; ++i)
      for (int j = 0; j < s.cols; ++j)
        if (Q(i, j) != 0.0) add_slot(obj, s, i, j, Q(i, j));
  };
  for (int k = 0; k < N; ++k) {
    add_trace(w.Qx(), sk.S[static_cast<std::size_t>(k)]);
    add_trace(Matrix::Identity(m, m), sk.Z[static_cast<std::size_t>(k)]);
  }
  add_trace(w.Qf(), sk.S[static_cast<std::size_t>(N)]);
  obj.add_to_objective(sk.prob);
  return sk;
}

Matrix read_free(const Vector& x, int offset, int rows, int cols) {
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = x(offset + r * cols + c);
  return out;
}

void require_optimal(const sdp::Solution& sol) {
  if (sol.status != sdp::Status::optimal)
    throw SolverError(std::string("SDP solve ended with status ") + sdp::status_name(sol.status));
}

// Reads S(0..N), checks the eigenvalue floor and returns LLT factors.
std::vector<Eigen::LLT<Matrix>> read_covariances(const sdp::Solution& sol, const std::vector<MatrixSlot>& slots,
                                                 std::vector<Matrix>& S) {
  std::vector<Eigen::LLT<Matrix>> factors;
  S.clear();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    Matrix Sk = symmetrize(slots[k].read(sol.X));
    const double lmin = min_eigenvalue(Sk);
    if (!(lmin >= kCovarianceFloor))
      throw DegenerateSolutionError("S(" + std::to_string(k) + ") has smallest eigenvalue " + std::to_string(lmin));
    factors.emplace_back(Sk);
    S.push_back(std::move(Sk));
  }
  return factors;
}

void copy_diagnostics(const sdp::Solution& sol, LqrSolution& out) {
  out.objective = sol.objective;
  out.status = sol.status;
  out.gap = sol.gap;
  out.primal_infeas = sol.primal_infeas;
  out.dual_infeas = sol.dual_infeas;
  out.iterations = sol.iterations;
}

}  // namespace

MbProgram build_mb_program(const LtiSystem& sys, const CostWeights& w, const BuildOptions& opts) {
  w.check_conforms(sys);
  const int n = sys.n(), m = sys.m(), N = w.horizon();
  const Matrix& A = sys.A();
  const Matrix& B = sys.B();
  const Matrix Rh = psd_sqrt(w.R());

  Skeleton sk = skeleton(n, m, w, opts.regularization);
  MbProgram out;
  out.vars.n = n;
  out.vars.m = m;
  out.vars.horizon = N;
  for (int k = 0; k < N; ++k) out.vars.h_offset.push_back(k * m * n);
  sk.prob.num_free = N * m * n;
  auto H = [&](int k, int r, int c) { return out.vars.h_offset[static_cast<std::size_t>(k)] + r * n + c; };

  for (int k = 0; k < N; ++k) {
    const int sb = sk.state_blocks[static_cast<std::size_t>(k)];
    const int ib = sk.input_blocks[static_cast<std::size_t>(k)];
    const MatrixSlot& Sk = sk.S[static_cast<std::size_t>(k)];
    // Upper-right of the state block: A S(k) + B H(k).
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        LinearForm f;
        f.add_entry(sb, i, n + j, 1.0);
        for (int l = 0; l < n; ++l)
          if (A(i, l) != 0.0) add_slot(f, Sk, l, j, -A(i, l));
        for (int l = 0; l < m; ++l)
          if (B(i, l) != 0.0) f.add_free(H(k, l, j), -B(i, l));
        sk.prob.constraints.push_back(f.equals_zero());
      }
    // Upper-right of the input block: R^{1/2} H(k).
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        LinearForm f;
        f.add_entry(ib, i, m + j, 1.0);
        for (int l = 0; l < m; ++l)
          if (Rh(i, l) != 0.0) f.add_free(H(k, l, j), -Rh(i, l));
        sk.prob.constraints.push_back(f.equals_zero());
      }
  }
  out.problem = std::move(sk.prob);
  out.vars.state_blocks = std::move(sk.state_blocks);
  out.vars.input_blocks = std::move(sk.input_blocks);
  out.vars.S = std::move(sk.S);
  out.vars.Z = std::move(sk.Z);
  return out;
}

DdProgram build_dd_program(const ExperimentRecord& rec, const CostWeights& w, const BuildOptions& opts) {
  const int n = rec.n(), m = rec.m(), T = rec.T(), N = w.horizon();
  if (w.n() != n || w.m() != m) throw DimensionError("build_dd_program: weights do not match the data");
  if (!rank_condition(rec))
    throw DataRichnessError("rank [U0T; X0T] < n + m: the data are not rich enough");
  const Matrix RU = psd_sqrt(w.R()) * rec.U0T;
  const Matrix& X0 = rec.X0T;
  const Matrix& X1 = rec.X1T;

  Skeleton sk = skeleton(n, m, w, opts.regularization);
  DdProgram out;
  out.vars.n = n;
  out.vars.m = m;
  out.vars.T = T;
  out.vars.horizon = N;
  for (int k = 0; k < N; ++k) out.vars.q_offset.push_back(k * T * n);
  sk.prob.num_free = N * T * n;
  auto Q = [&](int k, int t, int c) { return out.vars.q_offset[static_cast<std::size_t>(k)] + t * n + c; };

  for (int k = 0; k < N; ++k) {
    const int sb = sk.state_blocks[static_cast<std::size_t>(k)];
    const int ib = sk.input_blocks[static_cast<std::size_t>(k)];
    const MatrixSlot& Sk = sk.S[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        LinearForm f;
        f.add_entry(sb, i, n + j, 1.0);
        for (int t = 0; t < T; ++t)
          if (X1(i, t) != 0.0) f.add_free(Q(k, t, j), -X1(i, t));
        sk.prob.constraints.push_back(f.equals_zero());
      }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        LinearForm f;
        f.add_entry(ib, i, m + j, 1.0);
        for (int t = 0; t < T; ++t)
          if (RU(i, t) != 0.0) f.add_free(Q(k, t, j), -RU(i, t));
        sk.prob.constraints.push_back(f.equals_zero());
      }
    // S(k) = X0T Q(k): symmetric part on i <= j, skew part zero on i < j.
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        LinearForm sym;
        add_slot(sym, Sk, i, j, 1.0);
        for (int t = 0; t < T; ++t) {
          sym.add_free(Q(k, t, j), -0.5 * X0(i, t));
          sym.add_free(Q(k, t, i), -0.5 * X0(j, t));
        }
        sk.prob.constraints.push_back(sym.equals_zero());
        if (i == j) continue;
        LinearForm skew;
        for (int t = 0; t < T; ++t) {
          skew.add_free(Q(k, t, j), X0(i, t));
          skew.add_free(Q(k, t, i), -X0(j, t));
        }
        sk.prob.constraints.push_back(skew.equals_zero());
      }
  }
  out.problem = std::move(sk.prob);
  out.vars.state_blocks = std::move(sk.state_blocks);
  out.vars.input_blocks = std::move(sk.input_blocks);
  out.vars.S = std::move(sk.S);
  out.vars.Z = std::move(sk.Z);
  return out;
}

LqrSolution recover_gains_mb(const sdp::Solution& sol, const MbProgramVars& vars) {
  require_optimal(sol);
  LqrSolution out;
  out.mode = LqrMode::model_based;
  copy_diagnostics(sol, out);
  const auto factors = read_covariances(sol, vars.S, out.S);
  for (int k = 0; k < vars.horizon; ++k) {
    const Matrix H = read_free(sol.free, vars.h_offset[static_cast<std::size_t>(k)], vars.m, vars.n);
    // K = H S⁻¹  ⇔  S Kᵀ = Hᵀ.
    out.gains.push_back(factors[static_cast<std::size_t>(k)].solve(H.transpose()).transpose());
  }
  return out;
}

LqrSolution recover_gains_dd(const sdp::Solution& sol, const DdProgramVars& vars, const ExperimentRecord& rec) {
  require_optimal(sol);
  if (rec.n() != vars.n || rec.m() != vars.m || rec.T() != vars.T)
    throw DimensionError("recover_gains_dd: data do not match the program");
  LqrSolution out;
  out.mode = LqrMode::data_driven;
  copy_diagnostics(sol, out);
  const auto factors = read_covariances(sol, vars.S, out.S);
  for (int k = 0; k < vars.horizon; ++k) {
    const Matrix Q = read_free(sol.free, vars.q_offset[static_cast<std::size_t>(k)], vars.T, vars.n);
    Matrix G = factors[static_cast<std::size_t>(k)].solve(Q.transpose()).transpose();
    out.gains.push_back(rec.U0T * G);
    out.G.push_back(std::move(G));
  }
  return out;
}

LqrSolution solve_mb(const LtiSystem& sys, const CostWeights& w, const sdp::Options& opts,
                     const BuildOptions& build) {
  const MbProgram prog = build_mb_program(sys, w, build);
  return recover_gains_mb(sdp::solve(prog.problem, opts), prog.vars);
}

LqrSolution solve_dd(const ExperimentRecord& rec, const CostWeights& w, const sdp::Options& opts,
                     const BuildOptions& build) {
  const DdProgram prog = build_dd_program(rec, w, build);
  return recover_gains_dd(sdp::solve(prog.problem, opts), prog.vars, rec);
}

}  // namespace ddlqr
