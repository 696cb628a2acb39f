#include "sdp/operator.hpp"

#include <cmath>
#include <span>

#include "ddlqr/kernels.hpp"

namespace ddlqr::sdp::detail {
namespace {

std::span<const double> view(const Matrix& M) { return {M.data(), static_cast<std::size_t>(M.size())}; }
std::span<double> view(Matrix& M) { return {M.data(), static_cast<std::size_t>(M.size())}; }

}  // namespace

Operator::Operator(std::vector<int> dims, const std::vector<DenseRow>& rows)
    : dims_(std::move(dims)), num_rows_(static_cast<int>(rows.size())), by_block_(dims_.size()) {
  for (int i = 0; i < num_rows_; ++i)
    for (const BlockTerm& t : rows[static_cast<std::size_t>(i)].terms)
      by_block_[static_cast<std::size_t>(t.block)].push_back({i, &t.mat});
}

Vector Operator::apply(const std::vector<Matrix>& V) const {
  Vector out = Vector::Zero(num_rows_);
  for (std::size_t b = 0; b < by_block_.size(); ++b)
    for (const Incidence& inc : by_block_[b]) out(inc.row) += kernels::dot(view(*inc.mat), view(V[b]));
  return out;
}

std::vector<Matrix> Operator::adjoint(const Vector& y) const {
  std::vector<Matrix> out;
  out.reserve(dims_.size());
  for (std::size_t b = 0; b < dims_.size(); ++b) {
    Matrix acc = Matrix::Zero(dims_[b], dims_[b]);
    for (const Incidence& inc : by_block_[b])
      if (y(inc.row) != 0.0) kernels::axpy(y(inc.row), view(*inc.mat), view(acc));
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<DenseRow> Operator::congruence(const std::vector<Matrix>& G) const {
  std::vector<DenseRow> out(static_cast<std::size_t>(num_rows_));
  for (std::size_t b = 0; b < by_block_.size(); ++b)
    for (const Incidence& inc : by_block_[b]) {
      Matrix T = G[b].transpose() * (*inc.mat) * G[b];
      out[static_cast<std::size_t>(inc.row)].terms.push_back({static_cast<int>(b), symmetrize(T)});
    }
  return out;
}

Matrix Operator::gram() const {
  Matrix M = Matrix::Zero(num_rows_, num_rows_);
  for (const auto& list : by_block_)
    for (std::size_t p = 0; p < list.size(); ++p)
      for (std::size_t q = p; q < list.size(); ++q)
        M(list[q].row, list[p].row) += kernels::dot(view(*list[q].mat), view(*list[p].mat));
  M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
  return M;
}

double inner(const std::vector<Matrix>& A, const std::vector<Matrix>& B) {
  double s = 0.0;
  for (std::size_t b = 0; b < A.size(); ++b) s += kernels::dot(view(A[b]), view(B[b]));
  return s;
}

double frobenius(const std::vector<Matrix>& A) { return std::sqrt(inner(A, A)); }

}  // namespace ddlqr::sdp::detail
