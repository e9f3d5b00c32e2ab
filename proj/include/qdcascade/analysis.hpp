#pragma once

#include <array>
#include <span>
#include <string>

#include "qdcascade/histogram.hpp"

namespace qdc {

/// Normalized coincidences of one projection setting under the
/// three-detector scheme: the XX channel against the co-polarized port and
/// against its orthogonal complement, recorded simultaneously.
struct CorrelationSettingResult {
  std::string setting;  // two analyzer letters or "thetaXX:thetaX" degrees
  NormalizedCoincidence n_parallel;
  NormalizedCoincidence n_perp;
};

/// C = |n_par - n_perp| / (n_par + n_perp).
double visibility(double n_par, double n_perp);

/// Poisson-propagated uncertainty of the visibility.
double visibility_sigma(const NormalizedCoincidence& n_par, const NormalizedCoincidence& n_perp);

/// f = (1 + C_circ + C_hv + C_da) / 4.
double fidelity_from_visibilities(double c_circ, double c_hv, double c_da);

/// Correlation value of one basis pair from the four outcome coincidences
/// ordered (ab, ab_perp, a_perp b, a_perp b_perp):
/// E = (n_ab + n_a'b' - n_ab' - n_a'b) / sum.
double correlation_E(const std::array<NormalizedCoincidence, 4>& n);
double correlation_E_sigma(const std::array<NormalizedCoincidence, 4>& n);

/// S = |E1 - E2 + E3 + E4| for the slots (E(a,b), E(a,b'), E(a',b), E(a',b')).
double chsh_s(const std::array<double, 4>& e);

/// Least-squares fit of n(theta) = offset + amplitude*cos(theta + phase),
/// period fixed to 360 degrees. Needs >= 4 distinct angles.
struct FringeFit {
  double amplitude = 0.0;
  double phase_deg = 0.0;
  double offset = 0.0;
  double residual_rms = 0.0;
};

FringeFit fit_fringe(std::span<const double> theta_deg, std::span<const double> n);

/// Weighted log-linear fit of y = amplitude * e^{-rate t}; weights y^2.
/// Needs >= 3 strictly positive samples.
struct ExpFit {
  double rate_per_ns = 0.0;
  double amplitude = 0.0;
};

ExpFit fit_exponential(std::span<const double> t_ns, std::span<const double> y);

}  // namespace qdc
