#include "qdcascade/polarization.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qdc {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kInvSqrt2 = 0.7071067811865475244;

double wrap_deg(double x) {
  double y = std::fmod(x, 360.0);
  if (y < 0.0) y += 360.0;
  return y;
}
}  // namespace

PoincareAngle::PoincareAngle(double theta, double phi)
    : theta_deg(wrap_deg(theta)), phi_deg(wrap_deg(phi)) {
  if (!std::isfinite(theta) || !std::isfinite(phi))
    throw std::invalid_argument("PoincareAngle: non-finite angle");
}

PolState::PolState(cplx amp_r, cplx amp_l) {
  if (!std::isfinite(amp_r.real()) || !std::isfinite(amp_r.imag()) ||
      !std::isfinite(amp_l.real()) || !std::isfinite(amp_l.imag()))
    throw std::invalid_argument("PolState: non-finite amplitude");
  const double n = std::sqrt(std::norm(amp_r) + std::norm(amp_l));
  if (n < 1e-150) throw std::invalid_argument("PolState: zero amplitude");
  amp_r /= n;
  amp_l /= n;
  const double ar = std::abs(amp_r);
  if (ar > 1e-12) {
    const cplx phase = std::conj(amp_r) / ar;
    r_ = ar;  // exactly real by construction
    l_ = amp_l * phase;
  } else {
    const double al = std::abs(amp_l);
    r_ = amp_r * (std::conj(amp_l) / al);
    l_ = al;
  }
}

PolState PolState::L() { return {cplx(0.0), cplx(1.0)}; }
PolState PolState::H() { return {cplx(kInvSqrt2), cplx(kInvSqrt2)}; }
PolState PolState::V() { return {cplx(0.0, -kInvSqrt2), cplx(0.0, kInvSqrt2)}; }
PolState PolState::D() { return {cplx(kInvSqrt2), cplx(0.0, kInvSqrt2)}; }
PolState PolState::A() { return {cplx(kInvSqrt2), cplx(0.0, -kInvSqrt2)}; }

PolState state_from_angles(const PoincareAngle& a) {
  const double th = a.theta_deg * kDeg;
  const double ph = a.phi_deg * kDeg;
  return {cplx(std::cos(0.5 * th)), std::polar(std::sin(0.5 * th), ph)};
}

PolState orthogonal(const PolState& s) {
  return {-std::conj(s.amp_l()), std::conj(s.amp_r())};
}

cplx overlap(const PolState& bra, const PolState& ket) {
  return std::conj(bra.amp_r()) * ket.amp_r() + std::conj(bra.amp_l()) * ket.amp_l();
}

cplx amp_h(const PolState& s) { return kInvSqrt2 * (s.amp_r() + s.amp_l()); }

cplx amp_v(const PolState& s) { return cplx(0.0, kInvSqrt2) * (s.amp_r() - s.amp_l()); }

Mat2 projector(const PolState& s) {
  Mat2 p;
  const cplx r = s.amp_r(), l = s.amp_l();
  p(0, 0) = r * std::conj(r);
  p(0, 1) = r * std::conj(l);
  p(1, 0) = l * std::conj(r);
  p(1, 1) = l * std::conj(l);
  return p;
}

Vec4 two_photon_ket(const PolState& xx, const PolState& x) {
  return {xx.amp_r() * x.amp_r(), xx.amp_r() * x.amp_l(),
          xx.amp_l() * x.amp_r(), xx.amp_l() * x.amp_l()};
}

char basis_char(Basis b) {
  switch (b) {
    case Basis::R: return 'R';
    case Basis::L: return 'L';
    case Basis::H: return 'H';
    case Basis::V: return 'V';
    case Basis::D: return 'D';
    case Basis::A: return 'A';
  }
  throw std::invalid_argument("basis_char: bad basis");
}

Basis basis_from_char(char c) {
  switch (c) {
    case 'R': return Basis::R;
    case 'L': return Basis::L;
    case 'H': return Basis::H;
    case 'V': return Basis::V;
    case 'D': return Basis::D;
    case 'A': return Basis::A;
    default: throw std::invalid_argument(std::string("unknown polarization label '") + c + "'");
  }
}

PolState basis_state(Basis b) {
  switch (b) {
    case Basis::R: return PolState::R();
    case Basis::L: return PolState::L();
    case Basis::H: return PolState::H();
    case Basis::V: return PolState::V();
    case Basis::D: return PolState::D();
    case Basis::A: return PolState::A();
  }
  throw std::invalid_argument("basis_state: bad basis");
}

}  // namespace qdc
