#pragma once

#include <utility>
#include <vector>

#include "ddlqr/linalg.hpp"

namespace ddlqr::sdp::detail {

struct BlockTerm {
  int block = 0;
  Matrix mat;  // dense symmetric
};

struct DenseRow {
  std::vector<BlockTerm> terms;
  double rhs = 0.0;
};

/// The constraint map X ↦ (⟨A_i, X⟩)_i over dense block rows, its adjoint
/// and the HKM Schur complement. Inner loops run through ddlqr::kernels.
class Operator {
 public:
  Operator(std::vector<int> dims, const std::vector<DenseRow>& rows);

  int rows() const { return num_rows_; }
  const std::vector<int>& dims() const { return dims_; }

  /// (⟨A_i, V⟩)_i; V need not be symmetric.
  Vector apply(const std::vector<Matrix>& V) const;

  /// Σ y_i A_i.
  std::vector<Matrix> adjoint(const Vector& y) const;

  /// Rows with every A_i replaced by the congruence Gᵀ A_i G (per block).
  std::vector<DenseRow> congruence(const std::vector<Matrix>& G) const;

  /// G_ij = ⟨A_i, A_j⟩.
  Matrix gram() const;

 private:
  struct Incidence {
    int row;
    const Matrix* mat;
  };

  std::vector<int> dims_;
  int num_rows_;
  std::vector<std::vector<Incidence>> by_block_;  // sorted by row
};

double inner(const std::vector<Matrix>& A, const std::vector<Matrix>& B);
double frobenius(const std::vector<Matrix>& A);

}  // namespace ddlqr::sdp::detail
