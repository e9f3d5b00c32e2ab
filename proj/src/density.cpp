#include "qdcascade/density.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qdcascade/eig.hpp"

namespace qdc {

namespace {
constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kEigTol = 1e-9;
constexpr double kInvSqrt2 = 0.7071067811865475244;
}  // namespace

DensityMatrix4::DensityMatrix4(const Mat4& m) : m_(m) {
  if (!is_hermitian(m, kHermTol))
    throw std::invalid_argument("DensityMatrix4: matrix is not Hermitian");
  if (std::abs(m.trace() - cplx(1.0)) > kTraceTol)
    throw std::invalid_argument("DensityMatrix4: trace differs from one");
  const EigHermitian4 e = eig_hermitian4(m, kHermTol);
  if (e.values[3] < -kEigTol)
    throw std::invalid_argument("DensityMatrix4: negative eigenvalue " +
                                std::to_string(e.values[3]));
}

Vec4 bell_psi_ket() { return {cplx(0.0), cplx(kInvSqrt2), cplx(kInvSqrt2), cplx(0.0)}; }

DensityMatrix4 bell_psi() { return DensityMatrix4(outer(bell_psi_ket(), bell_psi_ket())); }

DensityMatrix4 werner(double v) {
  if (!(v >= -1.0 / 3.0 && v <= 1.0))
    throw std::invalid_argument("werner: v outside [-1/3, 1]");
  Mat4 m = outer(bell_psi_ket(), bell_psi_ket());
  m *= cplx(v);
  m += (0.25 * (1.0 - v)) * Mat4::identity();
  return DensityMatrix4(m);
}

DensityMatrix4 bell_diagonal_from_visibilities(double c_circ, double c_hv, double c_da) {
  if (!(c_circ >= 0.0 && c_circ <= 1.0 && c_hv >= 0.0 && c_hv <= 1.0 &&
        c_da >= 0.0 && c_da <= 1.0))
    throw std::invalid_argument("bell_diagonal_from_visibilities: visibility outside [0, 1]");
  Mat4 m = Mat4::identity();
  m -= cplx(c_circ) * kron(pauli::z(), pauli::z());
  m += cplx(c_hv) * kron(pauli::x(), pauli::x());
  m += cplx(c_da) * kron(pauli::y(), pauli::y());
  m *= cplx(0.25);
  try {
    return DensityMatrix4(m);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(
        "bell_diagonal_from_visibilities: visibilities combine to an unphysical state");
  }
}

double coincidence_probability(const DensityMatrix4& rho, const MeasurementSetting& s) {
  const Vec4 k = two_photon_ket(s.proj_xx, s.proj_x);
  return expectation(k, rho.matrix()).real();
}

double fidelity_to_bell(const DensityMatrix4& rho) {
  return expectation(bell_psi_ket(), rho.matrix()).real();
}

// ---- serialization ------------------------------------------------------

std::string density_to_json(const DensityMatrix4& rho, const std::string& summary_json) {
  nlohmann::json j;
  j["basis_order"] = DensityMatrix4::kBasisOrder;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      j["re"][r][c] = rho(r, c).real();
      j["im"][r][c] = rho(r, c).imag();
    }
  if (!summary_json.empty()) j["summary"] = nlohmann::json::parse(summary_json);
  return j.dump(2);
}

DensityMatrix4 density_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("basis_order", "") != DensityMatrix4::kBasisOrder)
    throw std::runtime_error("density matrix file: unexpected basis_order");
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      m(r, c) = cplx(j.at("re").at(r).at(c).get<double>(),
                     j.at("im").at(r).at(c).get<double>());
  return DensityMatrix4(m);
}

void save_density(const std::filesystem::path& p, const DensityMatrix4& rho,
                  const std::string& summary_json) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  f << density_to_json(rho, summary_json) << '\n';
}

DensityMatrix4 load_density(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return density_from_json(ss.str());
}

}  // namespace qdc
