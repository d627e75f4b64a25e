#pragma once

#include "netgeom/matrix.hpp"

namespace netgeom {

// Eigendecomposition of a symmetric matrix. values sorted descending,
// vectors holds the matching eigenvectors as columns.
struct SymEigen {
  std::vector<double> values;
  Matrix vectors;
};

// Cyclic Jacobi sweeps. Input is symmetrized as (A + A^T)/2 first.
// Stops when the off-diagonal Frobenius norm drops below 1e-12 * ||A||_F
// or after 100 sweeps.
SymEigen sym_eig(const Matrix& a);

// Largest singular value via power iteration on W^T W. Deterministic start
// vector, relative tolerance 1e-12, at most 10000 iterations.
double largest_singular_value(const Matrix& w);

// Smallest eigenvalue of a symmetric matrix (sym_eig under the hood).
double psd_min_eig(const Matrix& a);

}  // namespace netgeom
