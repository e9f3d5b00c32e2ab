#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>

#include "qdcascade/density.hpp"

namespace qdc {

/// hbar in ueV * ns.
inline constexpr double kHbarUevNs = 0.6582119569;

/// Physical source and detection parameters of the XX->X cascade.
/// Defaults follow the measured dot: X lifetime 560 ps, spin-scattering
/// time 1.5 ns, no resolvable fine structure splitting, 200 MHz pumping.
/// The XX rate is not measured independently; twice the X rate is the
/// usual lifetime ratio and only shapes the histogram peaks.
struct CascadeParams {
  double gamma1_per_ns = 1.0 / 0.560;    // X radiative rate
  double gamma_xx_per_ns = 2.0 / 0.560;  // XX radiative rate
  double gamma_s_per_ns = 1.0 / 1.5;     // exciton spin-scattering rate
  double fss_uev = 0.0;                  // fine structure splitting s
  double rep_rate_mhz = 200.0;
  double p_exc = 0.1;                    // cascade probability per pulse
  std::array<double, 3> det_eff{1.0, 1.0, 1.0};
  double jitter_ps = 0.0;                // Gaussian detector jitter sigma
  std::array<double, 3> dark_cps{0.0, 0.0, 0.0};

  double period_ps() const { return 1e6 / rep_rate_mhz; }

  void validate() const;  // throws std::invalid_argument
};

/// Time-integrated two-photon state of the cascade:
///   rho = int_0^inf g1 e^{-g1 t} [ e^{-gs t} |Psi(t)><Psi(t)| + (1 - e^{-gs t}) I/4 ] dt
/// with |Psi(t)> = (|HH> + e^{i s t / hbar} |VV>)/sqrt2. For s = 0 this is
/// werner(g1/(g1+gs)); a finite splitting rotates and shrinks the HH-VV
/// coherence to (1/2) g1 / sqrt((g1+gs)^2 + (s/hbar)^2).
DensityMatrix4 ensemble_state(const CascadeParams& p);

/// e^{-g1 t}: normalized photoluminescence decay of the X line.
double pl_decay(const CascadeParams& p, double t_ns);

/// e^{-gs t}: degree of circular polarization after circular excitation.
double dcp_curve(const CascadeParams& p, double t_ns);

// ---- flat key=value config ----------------------------------------------

using KvMap = std::map<std::string, std::string>;

KvMap parse_kv(const std::string& text);          // '#' comments, key=value
KvMap load_kv(const std::filesystem::path& p);

/// Reads the params fields present in kv (unknown keys are the caller's
/// business). Throws on malformed numbers.
void apply_params_kv(const KvMap& kv, CascadeParams& p);
std::string params_to_kv(const CascadeParams& p);

}  // namespace qdc
