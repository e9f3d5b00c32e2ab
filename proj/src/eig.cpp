#include "qdcascade/eig.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdc {

namespace {

double offdiag_norm(const Mat4& m) {
  double s = 0.0;
  for (int p = 0; p < 4; ++p)
    for (int q = p + 1; q < 4; ++q) s += std::norm(m(p, q));
  return std::sqrt(s);
}

}  // namespace

EigHermitian4 eig_hermitian4(const Mat4& m, double herm_tol) {
  for (int r = 0; r < 4; ++r)
    for (int c = r; c < 4; ++c)
      if (std::abs(m(r, c) - std::conj(m(c, r))) > herm_tol)
        throw std::invalid_argument("eig_hermitian4: matrix is not Hermitian");

  // Work on the exactly symmetrized copy so roundoff in the input cannot
  // leak into the rotations.
  Mat4 a;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));

  Mat4 v = Mat4::identity();
  const double scale = std::max(1.0, a.frobenius_norm());

  for (int sweep = 0; sweep < 64; ++sweep) {
    if (offdiag_norm(a) <= 1e-15 * scale) break;
    for (int p = 0; p < 4; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        const cplx apq = a(p, q);
        const double r = std::abs(apq);
        if (r <= 1e-300) continue;
        // Phase out a(p,q), then apply the real Jacobi rotation for
        // [[app, r], [r, aqq]].
        const cplx phase = apq / r;  // e^{i beta}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G(p,p)=c, G(p,q)=s, G(q,p)=-s*e^{-i beta}, G(q,q)=c*e^{-i beta}
        const cplx gqp = -s * std::conj(phase);
        const cplx gqq = c * std::conj(phase);
        for (int k = 0; k < 4; ++k) {  // A <- A G, V <- V G
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp + gqp * akq;
          a(k, q) = s * akp + gqq * akq;
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp + gqp * vkq;
          v(k, q) = s * vkp + gqq * vkq;
        }
        for (int k = 0; k < 4; ++k) {  // A <- G^dagger A
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + std::conj(gqp) * aqk;
          a(q, k) = s * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = std::conj(a(q, p));  // suppress roundoff drift
      }
    }
  }

  std::array<int, 4> order{0, 1, 2, 3};
  std::array<double, 4> diag{};
  for (int i = 0; i < 4; ++i) diag[i] = a(i, i).real();
  std::sort(order.begin(), order.end(), [&](int i, int j) { return diag[i] > diag[j]; });

  EigHermitian4 out;
  for (int i = 0; i < 4; ++i) {
    out.values[i] = diag[order[i]];
    for (int r = 0; r < 4; ++r) out.vectors(r, i) = v(r, order[i]);
  }
  return out;
}

double eig_residual(const Mat4& m, const EigHermitian4& e) {
  Mat4 d;
  for (int i = 0; i < 4; ++i) d(i, i) = e.values[i];
  const Mat4 rec = e.vectors * d * e.vectors.adjoint();
  return (m - rec).frobenius_norm();
}

Mat4 psd_sqrt(const Mat4& m) {
  const EigHermitian4 e = eig_hermitian4(m, 1e-8);
  Mat4 d;
  for (int i = 0; i < 4; ++i) d(i, i) = std::sqrt(std::max(0.0, e.values[i]));
  return e.vectors * d * e.vectors.adjoint();
}

}  // namespace qdc
