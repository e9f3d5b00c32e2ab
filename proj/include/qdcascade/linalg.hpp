#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace qdc {

using cplx = std::complex<double>;

/// 2x2 complex matrix, row-major.
struct Mat2 {
  std::array<cplx, 4> a{};

  cplx& operator()(int r, int c) { return a[2 * r + c]; }
  const cplx& operator()(int r, int c) const { return a[2 * r + c]; }
};

/// 4x4 complex matrix, row-major. Value type, cheap to copy.
struct Mat4 {
  std::array<cplx, 16> a{};

  cplx& operator()(int r, int c) { return a[4 * r + c]; }
  const cplx& operator()(int r, int c) const { return a[4 * r + c]; }

  static Mat4 zero() { return {}; }

  static Mat4 identity() {
    Mat4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
  }

  Mat4 adjoint() const {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = std::conj((*this)(c, r));
    return m;
  }

  cplx trace() const { return a[0] + a[5] + a[10] + a[15]; }

  double frobenius_norm() const {
    double s = 0.0;
    for (const cplx& x : a) s += std::norm(x);
    return std::sqrt(s);
  }

  Mat4& operator+=(const Mat4& o) {
    for (int i = 0; i < 16; ++i) a[i] += o.a[i];
    return *this;
  }

  Mat4& operator-=(const Mat4& o) {
    for (int i = 0; i < 16; ++i) a[i] -= o.a[i];
    return *this;
  }

  Mat4& operator*=(cplx s) {
    for (cplx& x : a) x *= s;
    return *this;
  }
};

inline Mat4 operator+(Mat4 x, const Mat4& y) { return x += y; }
inline Mat4 operator-(Mat4 x, const Mat4& y) { return x -= y; }
inline Mat4 operator*(cplx s, Mat4 m) { return m *= s; }
inline Mat4 operator*(double s, Mat4 m) { return m *= cplx(s, 0.0); }

inline Mat4 operator*(const Mat4& x, const Mat4& y) {
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) {
      const cplx xrk = x(r, k);
      for (int c = 0; c < 4; ++c) m(r, c) += xrk * y(k, c);
    }
  return m;
}

using Vec4 = std::array<cplx, 4>;

/// <u|v>
inline cplx inner(const Vec4& u, const Vec4& v) {
  cplx s = 0.0;
  for (int i = 0; i < 4; ++i) s += std::conj(u[i]) * v[i];
  return s;
}

/// |u><v|
inline Mat4 outer(const Vec4& u, const Vec4& v) {
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = u[r] * std::conj(v[c]);
  return m;
}

/// <u|m|u>
inline cplx expectation(const Vec4& u, const Mat4& m) {
  cplx s = 0.0;
  for (int r = 0; r < 4; ++r) {
    cplx row = 0.0;
    for (int c = 0; c < 4; ++c) row += m(r, c) * u[c];
    s += std::conj(u[r]) * row;
  }
  return s;
}

inline Mat4 kron(const Mat2& x, const Mat2& y) {
  Mat4 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m(2 * i + k, 2 * j + l) = x(i, j) * y(k, l);
  return m;
}

inline double max_abs_diff(const Mat4& x, const Mat4& y) {
  double m = 0.0;
  for (int i = 0; i < 16; ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}

inline bool is_hermitian(const Mat4& m, double tol) {
  for (int r = 0; r < 4; ++r)
    for (int c = r; c < 4; ++c)
      if (std::abs(m(r, c) - std::conj(m(c, r))) > tol) return false;
  return true;
}

namespace pauli {
inline Mat2 id() { return {{cplx(1), cplx(0), cplx(0), cplx(1)}}; }
inline Mat2 x() { return {{cplx(0), cplx(1), cplx(1), cplx(0)}}; }
inline Mat2 y() { return {{cplx(0), cplx(0, -1), cplx(0, 1), cplx(0)}}; }
inline Mat2 z() { return {{cplx(1), cplx(0), cplx(0), cplx(-1)}}; }
}  // namespace pauli

}  // namespace qdc
