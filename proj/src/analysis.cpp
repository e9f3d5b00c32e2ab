#include "qdcascade/analysis.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace qdc {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;

/// Gaussian elimination with partial pivoting for tiny systems.
template <int N>
std::array<double, N> solve(std::array<std::array<double, N + 1>, N> m) {
  for (int col = 0; col < N; ++col) {
    int piv = col;
    for (int r = col + 1; r < N; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-12) throw std::invalid_argument("degenerate design matrix");
    std::swap(m[col], m[piv]);
    for (int r = 0; r < N; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c <= N; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::array<double, N> x{};
  for (int i = 0; i < N; ++i) x[i] = m[i][N] / m[i][i];
  return x;
}
}  // namespace

double visibility(double n_par, double n_perp) {
  const double sum = n_par + n_perp;
  if (!(sum > 0.0)) throw std::invalid_argument("visibility: zero total coincidences");
  return std::abs((n_par - n_perp) / sum);
}

double visibility_sigma(const NormalizedCoincidence& n_par, const NormalizedCoincidence& n_perp) {
  const double sum = n_par.n + n_perp.n;
  if (!(sum > 0.0)) throw std::invalid_argument("visibility_sigma: zero total coincidences");
  // dC/dn_par = 2 n_perp / sum^2, dC/dn_perp = -2 n_par / sum^2 (up to sign).
  const double d1 = 2.0 * n_perp.n / (sum * sum);
  const double d2 = 2.0 * n_par.n / (sum * sum);
  return std::sqrt(d1 * d1 * n_par.poisson_sigma * n_par.poisson_sigma +
                   d2 * d2 * n_perp.poisson_sigma * n_perp.poisson_sigma);
}

double fidelity_from_visibilities(double c_circ, double c_hv, double c_da) {
  return 0.25 * (1.0 + c_circ + c_hv + c_da);
}

double correlation_E(const std::array<NormalizedCoincidence, 4>& n) {
  const double sum = n[0].n + n[1].n + n[2].n + n[3].n;
  if (!(sum > 0.0)) throw std::invalid_argument("correlation_E: zero total flux");
  return (n[0].n + n[3].n - n[1].n - n[2].n) / sum;
}

double correlation_E_sigma(const std::array<NormalizedCoincidence, 4>& n) {
  const double sum = n[0].n + n[1].n + n[2].n + n[3].n;
  if (!(sum > 0.0)) throw std::invalid_argument("correlation_E_sigma: zero total flux");
  const double num = n[0].n + n[3].n - n[1].n - n[2].n;
  const double sign[4] = {1.0, -1.0, -1.0, 1.0};
  double var = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double d = (sign[i] * sum - num) / (sum * sum);
    var += d * d * n[i].poisson_sigma * n[i].poisson_sigma;
  }
  return std::sqrt(var);
}

double chsh_s(const std::array<double, 4>& e) {
  return std::abs(e[0] - e[1] + e[2] + e[3]);
}

FringeFit fit_fringe(std::span<const double> theta_deg, std::span<const double> n) {
  if (theta_deg.size() != n.size())
    throw std::invalid_argument("fit_fringe: mismatched lengths");
  std::set<double> distinct(theta_deg.begin(), theta_deg.end());
  if (distinct.size() < 4)
    throw std::invalid_argument("fit_fringe: need at least 4 distinct angles");

  // n(theta) = offset + a cos(theta) + b sin(theta); linear in (offset, a, b).
  std::array<std::array<double, 4>, 3> m{};
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double basis[3] = {1.0, std::cos(theta_deg[i] * kDeg), std::sin(theta_deg[i] * kDeg)};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
      m[r][3] += basis[r] * n[i];
    }
  }
  const auto x = solve<3>(m);
  const double offset = x[0], a = x[1], b = x[2];

  FringeFit fit;
  fit.offset = offset;
  fit.amplitude = std::hypot(a, b);
  // a cos t + b sin t = A cos(t + phase) with A cos(phase) = a, A sin(phase) = -b.
  fit.phase_deg = fit.amplitude > 0.0 ? std::atan2(-b, a) / kDeg : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double pred = offset + fit.amplitude * std::cos(theta_deg[i] * kDeg + fit.phase_deg * kDeg);
    ss += (n[i] - pred) * (n[i] - pred);
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(n.size()));
  return fit;
}

ExpFit fit_exponential(std::span<const double> t_ns, std::span<const double> y) {
  if (t_ns.size() != y.size()) throw std::invalid_argument("fit_exponential: mismatched lengths");
  if (y.size() < 3) throw std::invalid_argument("fit_exponential: need at least 3 points");
  for (double v : y)
    if (!(v > 0.0)) throw std::invalid_argument("fit_exponential: samples must be positive");

  // log y = log A - r t, weights y^2 (constant absolute noise on y).
  double sw = 0.0, st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double w = y[i] * y[i];
    const double l = std::log(y[i]);
    sw += w;
    st += w * t_ns[i];
    sl += w * l;
    stt += w * t_ns[i] * t_ns[i];
    stl += w * t_ns[i] * l;
  }
  const double det = sw * stt - st * st;
  if (std::abs(det) < 1e-12 * sw * stt + 1e-300)
    throw std::invalid_argument("fit_exponential: degenerate time points");
  const double slope = (sw * stl - st * sl) / det;
  const double intercept = (stt * sl - st * stl) / det;
  return {.rate_per_ns = -slope, .amplitude = std::exp(intercept)};
}

}  // namespace qdc
