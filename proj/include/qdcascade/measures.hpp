#pragma once

#include "qdcascade/density.hpp"
#include "qdcascade/linalg.hpp"

namespace qdc {

/// Transpose over the second (X-photon) subsystem.
Mat4 partial_transpose(const Mat4& m);

/// Minimum eigenvalue of the partial transpose; negative certifies
/// entanglement (Peres criterion).
double peres_min_eigenvalue(const DensityMatrix4& rho);

/// Wootters concurrence: max(0, l1-l2-l3-l4) with li the descending square
/// roots of the eigenvalues of rho (sy(x)sy) rho* (sy(x)sy).
double concurrence(const DensityMatrix4& rho);

/// Concurrence squared.
double tangle(const DensityMatrix4& rho);

/// Binary entropy in bits, h(0)=h(1)=0.
double binary_entropy(double x);

/// E_F = h((1 + sqrt(1-T))/2).
double eof_from_tangle(double t);

/// Entanglement of formation from the Wootters concurrence.
double entanglement_of_formation(const DensityMatrix4& rho);

/// (4/3)(1 - Tr rho^2): 0 for pure states, 1 for I/4.
double linear_entropy(const DensityMatrix4& rho);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double state_fidelity(const DensityMatrix4& rho, const DensityMatrix4& sigma);

}  // namespace qdc
