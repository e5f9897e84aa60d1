#pragma once

#include <vector>

#include "relicmp/types.hpp"

// Small dense symmetric linear algebra (k <= ~50). Cyclic Jacobi keeps the
// eigendecomposition deterministic and accurate enough for the pseudoinverse
// and factorization tolerances used downstream.

namespace relicmp {

struct EigenSym {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j is the eigenvector for values[j]
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
/// Throws NonSymmetric if the input exceeds the relative asymmetry tolerance.
EigenSym eigen_sym(const Matrix& a, double sym_tol = 1e-12);

/// Moore-Penrose pseudoinverse of a symmetric matrix. Eigenvalues with
/// |lambda| <= 1e-10 * max|lambda| are treated as zero; the all-zero matrix
/// maps to the all-zero matrix.
Matrix pseudoinverse(const Matrix& a);

/// Factor F with F F' = a for a symmetric PSD matrix. Returns the lower
/// Cholesky factor when the matrix is comfortably positive definite and an
/// eigenvalue factor V sqrt(max(Lambda,0)) otherwise. Throws NotPSD when the
/// smallest eigenvalue is below -1e-8 * lambda_max.
Matrix cholesky_psd(const Matrix& a);

/// Diagonal of the inverse of a symmetric positive definite matrix.
/// Throws SingularGradient-free NotPSD/DegenerateInput style errors via
/// Error(invalid_request) when the matrix is numerically singular.
std::vector<double> inverse_diagonal(const Matrix& a);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

}  // namespace relicmp
