#include "qdcascade/measures.hpp"

#include <algorithm>
#include <cmath>

#include "qdcascade/eig.hpp"

namespace qdc {

Mat4 partial_transpose(const Mat4& m) {
  // Index (i,a) with i the XX qubit, a the X qubit: out[(i,a),(j,b)] = in[(i,b),(j,a)].
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j < 2; ++j)
        for (int b = 0; b < 2; ++b) out(2 * i + a, 2 * j + b) = m(2 * i + b, 2 * j + a);
  return out;
}

double peres_min_eigenvalue(const DensityMatrix4& rho) {
  return eig_hermitian4(partial_transpose(rho.matrix())).values[3];
}

double concurrence(const DensityMatrix4& rho) {
  const Mat4 yy = kron(pauli::y(), pauli::y());
  Mat4 conj_rho;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) conj_rho(r, c) = std::conj(rho(r, c));
  const Mat4 rho_tilde = yy * conj_rho * yy;
  // sqrt(rho) rho_tilde sqrt(rho) is Hermitian PSD and similar to rho*rho_tilde.
  const Mat4 s = psd_sqrt(rho.matrix());
  const EigHermitian4 e = eig_hermitian4(s * rho_tilde * s, 1e-8);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, e.values[i]));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double tangle(const DensityMatrix4& rho) {
  const double c = concurrence(rho);
  return c * c;
}

double binary_entropy(double x) {
  double h = 0.0;
  for (double p : {x, 1.0 - x})
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

double eof_from_tangle(double t) {
  return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - t))));
}

double entanglement_of_formation(const DensityMatrix4& rho) {
  return eof_from_tangle(tangle(rho));
}

double linear_entropy(const DensityMatrix4& rho) {
  const double purity = rho.matrix().frobenius_norm();
  return (4.0 / 3.0) * (1.0 - purity * purity);
}

double state_fidelity(const DensityMatrix4& rho, const DensityMatrix4& sigma) {
  const Mat4 s = psd_sqrt(rho.matrix());
  const EigHermitian4 e = eig_hermitian4(s * sigma.matrix() * s, 1e-8);
  double tr = 0.0;
  for (double v : e.values) tr += std::sqrt(std::max(0.0, v));
  return tr * tr;
}

}  // namespace qdc
