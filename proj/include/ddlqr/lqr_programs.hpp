#pragma once

#include <vector>

#include "ddlqr/excitation_data.hpp"
#include "ddlqr/lti_system.hpp"
#include "ddlqr/sdp/problem.hpp"
#include "ddlqr/sdp/solver.hpp"

namespace ddlqr {

/// A rows x cols sub-matrix of an SDP block. The matrix it stands for is
/// X_block[row0.., col0..] + diag_shift·I (the shift only applies to square
/// slots sitting on the block diagonal).
struct MatrixSlot {
  int block = 0;
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;
  double diag_shift = 0.0;

  Matrix read(const std::vector<Matrix>& X) const;
};

/// Layout of the model-based program. Per step k < N there is a 2n block
/// [[S(k+1) - I, A S(k) + B H(k)], [*, S(k)]] and an (m+n) block
/// [[Z(k), R^{1/2} H(k)], [*, S(k)]]. H(k) = K(k) S(k) is a free m x n
/// variable stored row-major from h_offset[k].
struct MbProgramVars {
  int n = 0;
  int m = 0;
  int horizon = 0;
  std::vector<int> state_blocks;  // the 2n blocks
  std::vector<int> input_blocks;  // the (m+n) blocks
  std::vector<MatrixSlot> S;      // k = 0..N
  std::vector<MatrixSlot> Z;      // k = 0..N-1
  std::vector<int> h_offset;      // k = 0..N-1
};

/// Layout of the data-driven program. Blocks are as in the model-based
/// case with X1T Q(k) and R^{1/2} U0T Q(k) in the off-diagonal corners.
/// Q(k) is a free T x n variable stored row-major from q_offset[k], tied to
/// S(k) by S(k) = X0T Q(k).
struct DdProgramVars {
  int n = 0;
  int m = 0;
  int T = 0;
  int horizon = 0;
  std::vector<int> state_blocks;
  std::vector<int> input_blocks;
  std::vector<MatrixSlot> S;
  std::vector<MatrixSlot> Z;
  std::vector<int> q_offset;
};

struct BuildOptions {
  /// Blocks are constrained to be ⪰ regularization·I instead of ⪰ 0.
  double regularization = 0.0;
};

enum class LqrMode { model_based, data_driven };

const char* mode_name(LqrMode mode);

struct LqrSolution {
  std::vector<Matrix> gains;  ///< K(0..N-1)
  std::vector<Matrix> S;      ///< S(0..N)
  std::vector<Matrix> G;      ///< Q(k) S(k)⁻¹, data-driven only
  double objective = 0.0;
  LqrMode mode = LqrMode::model_based;

  sdp::Status status = sdp::Status::max_iters;
  double gap = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  int iterations = 0;
};

struct MbProgram {
  sdp::Problem problem;
  MbProgramVars vars;
};

struct DdProgram {
  sdp::Problem problem;
  DdProgramVars vars;
};

MbProgram build_mb_program(const LtiSystem& sys, const CostWeights& w, const BuildOptions& opts = {});

/// Throws DataRichnessError if rank [U0T; X0T] < n + m.
DdProgram build_dd_program(const ExperimentRecord& rec, const CostWeights& w, const BuildOptions& opts = {});

/// K(k) = H(k) S(k)⁻¹. Throws SolverError unless the solve was optimal and
/// DegenerateSolutionError if some S(k) has an eigenvalue below 1 - 1e-6.
LqrSolution recover_gains_mb(const sdp::Solution& sol, const MbProgramVars& vars);

/// K(k) = U0T Q(k) S(k)⁻¹, G(k) = Q(k) S(k)⁻¹. Errors as recover_gains_mb.
LqrSolution recover_gains_dd(const sdp::Solution& sol, const DdProgramVars& vars, const ExperimentRecord& rec);

LqrSolution solve_mb(const LtiSystem& sys, const CostWeights& w, const sdp::Options& opts = {},
                     const BuildOptions& build = {});
LqrSolution solve_dd(const ExperimentRecord& rec, const CostWeights& w, const sdp::Options& opts = {},
                     const BuildOptions& build = {});

inline constexpr double kCovarianceFloor = 1.0 - 1e-6;

}  // namespace ddlqr
