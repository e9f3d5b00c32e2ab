#pragma once

#include <string>

#include "qdcascade/linalg.hpp"

namespace qdc {

/// Point on the Poincare sphere, degrees. theta is the polar angle moving in
/// the RL-HV great circle (theta=0 is R, theta=90 is H), phi the azimuth
/// towards D (phi=90) / A (phi=270). Both normalized to [0, 360).
struct PoincareAngle {
  double theta_deg = 0.0;
  double phi_deg = 0.0;

  PoincareAngle() = default;
  PoincareAngle(double theta, double phi);
};

/// Pure single-photon polarization state, amplitudes in the circular R/L
/// basis. Normalized on construction; the global phase is fixed so that
/// amp_r is real >= 0 (amp_l real >= 0 when amp_r vanishes), which makes
/// states directly comparable.
class PolState {
 public:
  PolState() = default;  // |R>
  PolState(cplx amp_r, cplx amp_l);

  cplx amp_r() const { return r_; }
  cplx amp_l() const { return l_; }

  static PolState R() { return {}; }
  static PolState L();
  static PolState H();
  static PolState V();
  static PolState D();
  static PolState A();

 private:
  cplx r_{1.0, 0.0};
  cplx l_{0.0, 0.0};
};

/// |psi> = cos(theta/2)|R> + e^{i phi} sin(theta/2)|L>.
/// Conventions: |H>=(|R>+|L>)/sqrt2, |V>=-i(|R>-|L>)/sqrt2,
/// |D>=(|H>+|V>)/sqrt2, |A>=(|H>-|V>)/sqrt2.
PolState state_from_angles(const PoincareAngle& a);

/// The orthogonal complement on the Poincare sphere (antipodal state).
PolState orthogonal(const PolState& s);

/// <bra|ket> in the circular basis.
cplx overlap(const PolState& bra, const PolState& ket);

/// <H|psi> and <V|psi> under the fixed linear-basis conventions.
cplx amp_h(const PolState& s);
cplx amp_v(const PolState& s);

/// |psi><psi| as a 2x2 matrix in the R/L basis.
Mat2 projector(const PolState& s);

/// Product ket |a>|b> in the two-photon basis (RR, RL, LR, LL); the first
/// factor is the XX photon.
Vec4 two_photon_ket(const PolState& xx, const PolState& x);

/// Two-photon projection setting: analyzer state for the XX arm and for the
/// co-port of the X arm (the cross-port is its orthogonal complement).
struct MeasurementSetting {
  PolState proj_xx;
  PolState proj_x;
};

/// The six cardinal analyzer labels used throughout the measurements.
enum class Basis : int { R = 0, L, H, V, D, A };

char basis_char(Basis b);
Basis basis_from_char(char c);
PolState basis_state(Basis b);

}  // namespace qdc
