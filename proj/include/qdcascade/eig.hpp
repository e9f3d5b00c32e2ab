#pragma once

#include <array>

#include "qdcascade/linalg.hpp"

namespace qdc {

/// Eigendecomposition of a 4x4 Hermitian matrix: m = V diag(values) V^dagger,
/// eigenvalues sorted descending, eigenvectors in the columns of `vectors`.
struct EigHermitian4 {
  std::array<double, 4> values{};
  Mat4 vectors;
};

/// Cyclic complex Jacobi diagonalization. Throws std::invalid_argument when
/// the input deviates from Hermiticity by more than `herm_tol` per element.
EigHermitian4 eig_hermitian4(const Mat4& m, double herm_tol = 1e-10);

/// Reconstruction residual ||m - V diag(values) V^dagger||_F.
double eig_residual(const Mat4& m, const EigHermitian4& e);

/// Hermitian square root with negative eigenvalues clamped to zero.
Mat4 psd_sqrt(const Mat4& m);

}  // namespace qdc
