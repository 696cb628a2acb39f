#pragma once

#include <iosfwd>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "ddlqr/linalg.hpp"

namespace ddlqr::sdp {

/// One entry of a symmetric block matrix, stored upper-triangular
/// (row <= col). An off-diagonal entry stands for both (row, col) and
/// (col, row), as in the SDPA sparse format.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// ⟨A, X⟩ + Σ f_j x_j = rhs, where X is the block-diagonal PSD variable and
/// x the free scalar variables.
struct Constraint {
  std::vector<Entry> entries;
  std::vector<std::pair<int, double>> free_terms;
  double rhs = 0.0;
};

/// Standard-form semidefinite program
///
///   minimize   ⟨C, X⟩ + cᵀx + offset
///   subject to ⟨A_i, X⟩ + f_iᵀx = b_i,   X = diag(X_1, ..., X_p) ⪰ 0,
///
/// with x free. Its dual is: maximize bᵀy + offset subject to
/// C - Σ y_i A_i = Z ⪰ 0 and Σ y_i f_i = c.
struct Problem {
  std::vector<int> block_dims;
  int num_free = 0;
  std::vector<Entry> objective;
  std::vector<double> free_objective;  ///< empty or num_free long
  double objective_offset = 0.0;
  std::vector<Constraint> constraints;

  int num_constraints() const { return static_cast<int>(constraints.size()); }
  int add_block(int dim);

  /// Throws DimensionError on out-of-range or lower-triangular entries,
  /// non-positive block sizes or a bad free_objective length.
  void validate() const;

  /// Dense symmetric per-block objective matrices.
  std::vector<Matrix> objective_blocks() const;
  Vector free_objective_vector() const;
};

/// Affine form Σ coef·X_b[r, c] + Σ coef·x_j + constant over the problem's
/// variables. Used to write constraints and objectives in terms of matrix
/// entries rather than symmetric-matrix inner products.
class LinearForm {
 public:
  /// Adds coef·X_block[row, col]; (row, col) and (col, row) name the same
  /// variable.
  LinearForm& add_entry(int block, int row, int col, double coef);
  LinearForm& add_free(int index, double coef);
  LinearForm& add_constant(double value);

  bool empty() const { return entries_.empty() && free_.empty(); }

  /// The constraint "form = 0".
  Constraint equals_zero() const;

  /// Adds the form to the objective of `prob`.
  void add_to_objective(Problem& prob) const;

 private:
  std::vector<Entry> symmetric_entries() const;

  std::map<std::tuple<int, int, int>, double> entries_;
  std::map<int, double> free_;
  double constant_ = 0.0;
};

/// Text dump in an SDPA-like sparse triplet format:
///
///   ddlqr-sdp 1
///   <constraints> <blocks> <free>
///   <d_1> ... <d_p>
///   <b_1> ... <b_m>
///   <offset>
///   <con> <block> <row> <col> <value>     (1-based; con 0 is the objective)
///   <con> 0 <free index> 0 <value>        (free-variable coefficient)
void write_triplets(const Problem& prob, std::ostream& out);

/// Inverse of write_triplets. Throws IoError on malformed input.
Problem read_triplets(std::istream& in);

}  // namespace ddlqr::sdp
