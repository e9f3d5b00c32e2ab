#pragma once

#include <filesystem>
#include <string>

#include "qdcascade/linalg.hpp"
#include "qdcascade/polarization.hpp"

namespace qdc {

/// Two-photon polarization density matrix in the (RR, RL, LR, LL) product
/// basis. Construction validates Hermiticity (1e-10), unit trace (1e-10) and
/// positivity (min eigenvalue >= -1e-9); instances are immutable afterwards.
class DensityMatrix4 {
 public:
  static constexpr const char* kBasisOrder = "RR,RL,LR,LL";

  explicit DensityMatrix4(const Mat4& m);

  const Mat4& matrix() const { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }

 private:
  Mat4 m_;
};

/// The target Bell ket (|LR> + |RL>)/sqrt2 == (|HH> + |VV>)/sqrt2.
Vec4 bell_psi_ket();

/// |Psi><Psi| for the Bell ket above.
DensityMatrix4 bell_psi();

/// v |Psi><Psi| + (1-v) I/4, v in [-1/3, 1].
DensityMatrix4 werner(double v);

/// Bell-diagonal state fixed by the three basis visibilities:
/// rho = (I - c_circ sz(x)sz + c_hv sx(x)sx + c_da sy(x)sy)/4 where the
/// sz/sx/sy eigenbases are R/L, H/V and D/A. Arguments must lie in [0, 1]
/// and combine to a positive matrix; fidelity to the Bell state is exactly
/// (1 + c_circ + c_hv + c_da)/4.
DensityMatrix4 bell_diagonal_from_visibilities(double c_circ, double c_hv, double c_da);

/// Tr[rho (P_xx (x) P_x)] for the projective setting s.
double coincidence_probability(const DensityMatrix4& rho, const MeasurementSetting& s);

/// <Psi|rho|Psi> against the Bell ket.
double fidelity_to_bell(const DensityMatrix4& rho);

// ---- serialization ------------------------------------------------------
// JSON document with "basis_order" plus 4x4 "re"/"im" arrays; numbers are
// emitted with full round-trip precision so load(save(rho)) is bit-exact.
// An optional extra object may be attached under "summary".

std::string density_to_json(const DensityMatrix4& rho, const std::string& summary_json = "");
DensityMatrix4 density_from_json(const std::string& text);
void save_density(const std::filesystem::path& p, const DensityMatrix4& rho,
                  const std::string& summary_json = "");
DensityMatrix4 load_density(const std::filesystem::path& p);

}  // namespace qdc
