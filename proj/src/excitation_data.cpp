#include "ddlqr/excitation_data.hpp"

#include <stdexcept>

#include <Eigen/QR>

#include "ddlqr/errors.hpp"

namespace ddlqr {

Matrix hankel(std::span<const Vector> signal, int start, int depth, int cols) {
  if (depth < 1 || cols < 1) throw std::invalid_argument("hankel: depth and cols must be >= 1");
  if (start < 0 || static_cast<long>(start) + depth + cols - 1 > static_cast<long>(signal.size()))
    throw RangeError("hankel: signal does not cover the requested window");
  const Eigen::Index sigma = signal[static_cast<std::size_t>(start)].size();
  Matrix H(sigma * depth, cols);
  for (int r = 0; r < depth; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Vector& z = signal[static_cast<std::size_t>(start + r + c)];
      if (z.size() != sigma) throw DimensionError("hankel: ragged signal");
      H.block(r * sigma, c, sigma, 1) = z;
    }
  }
  return H;
}

bool pe_order_check(std::span<const Vector> signal, int order) {
  if (order < 1 || signal.empty()) return false;
  const long T = static_cast<long>(signal.size());
  const long sigma = signal.front().size();
  if (T < (sigma + 1) * order - 1) return false;
  const Matrix H = hankel(signal, 0, order, static_cast<int>(T - order + 1));
  return numerical_rank(H) == sigma * order;
}

int pe_order(std::span<const Vector> signal) {
  int order = 0;
  while (pe_order_check(signal, order + 1)) ++order;
  return order;
}

ExperimentRecord ExperimentRecord::from_matrices(Matrix U0T, Matrix X0T, Matrix X1T) {
  const Eigen::Index T = U0T.cols();
  if (T < 1 || X0T.cols() != T || X1T.cols() != T)
    throw DimensionError("ExperimentRecord: data matrices need equal, positive column counts");
  if (X1T.rows() != X0T.rows()) throw DimensionError("ExperimentRecord: X0T and X1T differ in rows");
  if (T > 1 && X1T.leftCols(T - 1) != X0T.rightCols(T - 1))
    throw DimensionError("ExperimentRecord: X1T is not X0T shifted by one sample");
  ExperimentRecord rec;
  rec.raw.inputs = split_columns(U0T);
  rec.raw.states = split_columns(X0T);
  rec.raw.states.emplace_back(X1T.col(T - 1));
  rec.U0T = std::move(U0T);
  rec.X0T = std::move(X0T);
  rec.X1T = std::move(X1T);
  return rec;
}

ExperimentRecord collect_experiment(const LtiSystem& sys, const Vector& x0, std::span<const Vector> inputs) {
  if (inputs.empty()) throw std::invalid_argument("collect_experiment: experiment length must be >= 1");
  ExperimentRecord rec;
  rec.raw = simulate(sys, x0, inputs);
  const Matrix states = stack_columns(rec.raw.states);
  const Eigen::Index T = static_cast<Eigen::Index>(inputs.size());
  rec.U0T = stack_columns(rec.raw.inputs);
  rec.X0T = states.leftCols(T);
  rec.X1T = states.rightCols(T);
  return rec;
}

bool rank_condition(const ExperimentRecord& rec) {
  Matrix D(rec.m() + rec.n(), rec.T());
  D << rec.U0T, rec.X0T;
  return numerical_rank(D) == rec.m() + rec.n();
}

Matrix solve_feedback_parametrization(const ExperimentRecord& rec, const Matrix& K) {
  const int n = rec.n(), m = rec.m();
  if (K.rows() != m || K.cols() != n) throw DimensionError("solve_feedback_parametrization: K must be m x n");
  if (!rank_condition(rec))
    throw DataRichnessError("solve_feedback_parametrization: rank[U0T; X0T] < n + m");
  Matrix D(m + n, rec.T());
  D << rec.U0T, rec.X0T;
  Matrix rhs(m + n, n);
  rhs << K, Matrix::Identity(n, n);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(D);
  return cod.solve(rhs);
}

std::vector<Vector> pe_input(int m, int T, Rng& rng) {
  if (m < 1 || T < 1) throw std::invalid_argument("pe_input: m and T must be >= 1");
  std::vector<Vector> u;
  u.reserve(static_cast<std::size_t>(T));
  for (int k = 0; k < T; ++k) u.push_back(rng.normal_vector(m));
  return u;
}

}  // namespace ddlqr
