#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ddlqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// (M + Mᵀ) / 2.
Matrix symmetrize(const Matrix& M);

/// Largest entrywise asymmetry max |M - Mᵀ|.
double asymmetry(const Matrix& M);

/// Numerical rank: singular value s counts iff s > max(rows, cols) * s_max * 2^-52.
int numerical_rank(const Matrix& M);

double min_eigenvalue(const Matrix& symmetric);
double max_eigenvalue(const Matrix& symmetric);

/// Symmetric PSD square root via eigendecomposition (negative eigenvalues clamped).
Matrix psd_sqrt(const Matrix& symmetric);

double spectral_radius(const Matrix& M);

/// Columns of the result are the vectors of the sequence, in order.
Matrix stack_columns(std::span<const Vector> seq);

/// Inverse of stack_columns.
std::vector<Vector> split_columns(const Matrix& M);

}  // namespace ddlqr
