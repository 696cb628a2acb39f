#include "ddlqr/linalg.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ddlqr/errors.hpp"

namespace ddlqr {

Matrix symmetrize(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("symmetrize: matrix is not square");
  return 0.5 * (M + M.transpose());
}

double asymmetry(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("asymmetry: matrix is not square");
  if (M.size() == 0) return 0.0;
  return (M - M.transpose()).cwiseAbs().maxCoeff();
}

int numerical_rank(const Matrix& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double tol = static_cast<double>(std::max(M.rows(), M.cols())) * s(0) *
                     std::numeric_limits<double>::epsilon();
  return static_cast<int>((s.array() > tol).count());
}

double min_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Matrix psd_sqrt(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(symmetric));
  Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

double spectral_radius(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("spectral_radius: matrix is not square");
  Eigen::EigenSolver<Matrix> es(M, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix stack_columns(std::span<const Vector> seq) {
  if (seq.empty()) return Matrix(0, 0);
  const Eigen::Index rows = seq.front().size();
  Matrix out(rows, static_cast<Eigen::Index>(seq.size()));
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (seq[k].size() != rows) throw DimensionError("stack_columns: ragged sequence");
    out.col(static_cast<Eigen::Index>(k)) = seq[k];
  }
  return out;
}

std::vector<Vector> split_columns(const Matrix& M) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(M.cols()));
  for (Eigen::Index c = 0; c < M.cols(); ++c) out.emplace_back(M.col(c));
  return out;
}

}  // namespace ddlqr
