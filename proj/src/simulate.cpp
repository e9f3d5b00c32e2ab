#include "qdcascade/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qdcascade/rng.hpp"

namespace qdc {

namespace {

struct OutcomeProbs {
  // [xx outcome][x port]: 0 = analyzer passed / co-port, 1 = complement.
  double p[2][2];
};

OutcomeProbs probs_from_state(const Mat4& rho, const PolState& pxx, const PolState& px) {
  const PolState pxx_perp = orthogonal(pxx);
  const PolState px_perp = orthogonal(px);
  OutcomeProbs o{};
  const PolState* xs[2] = {&pxx, &pxx_perp};
  const PolState* bs[2] = {&px, &px_perp};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      o.p[i][j] = std::max(0.0, expectation(two_photon_ket(*xs[i], *bs[j]), rho).real());
  return o;
}

}  // namespace

std::array<EventStream, 3> simulate(const CascadeParams& params,
                                    const MeasurementSetting& setting,
                                    double duration_s, std::uint64_t seed,
                                    const std::optional<DensityMatrix4>& source_override) {
  params.validate();
  const double pulses_exact = duration_s * params.rep_rate_mhz * 1e6;
  if (!(pulses_exact >= 1.0))
    throw std::invalid_argument("simulate: duration covers no pulse");
  const std::uint64_t n_pulses = static_cast<std::uint64_t>(pulses_exact);
  const double period_ps = params.period_ps();
  const double duration_ps = duration_s * 1e12;

  Rng rng(seed);
  std::array<EventStream, 3> out;
  for (int i = 0; i < 3; ++i) out[i].channel = i;

  // Analyzer overlaps with |H> and |V>, for the coherent-state amplitudes
  // <a(x)b|Psi(tau)> = (<a|H><b|H> + e^{i phi} <a|V><b|V >)/sqrt2.
  const PolState pxx_perp = orthogonal(setting.proj_xx);
  const PolState px_perp = orthogonal(setting.proj_x);
  const PolState* axx[2] = {&setting.proj_xx, &pxx_perp};
  const PolState* ax[2] = {&setting.proj_x, &px_perp};
  cplx hxx[2], vxx[2], hx[2], vx[2];
  for (int i = 0; i < 2; ++i) {
    hxx[i] = std::conj(amp_h(*axx[i]));
    vxx[i] = std::conj(amp_v(*axx[i]));
    hx[i] = std::conj(amp_h(*ax[i]));
    vx[i] = std::conj(amp_v(*ax[i]));
  }

  std::optional<OutcomeProbs> fixed;
  if (source_override)
    fixed = probs_from_state(source_override->matrix(), setting.proj_xx, setting.proj_x);

  const double omega_per_ns = params.fss_uev / kHbarUevNs;

  auto emit = [&](int ch, double t_ps) {
    if (params.jitter_ps > 0.0) t_ps += params.jitter_ps * rng.gaussian();
    out[ch].t_ps.push_back(std::llround(t_ps));
  };

  std::uint64_t k = 0;
  while (k < n_pulses) {
    const std::uint64_t skip = rng.geometric_failures(params.p_exc);
    if (skip >= n_pulses - k) break;
    k += skip;

    const double t_pulse = static_cast<double>(k) * period_ps;
    const double xx_delay_ns = rng.exponential(params.gamma_xx_per_ns);
    const double dwell_ns = rng.exponential(params.gamma1_per_ns);
    const double t_xx = t_pulse + 1e3 * xx_delay_ns;
    const double t_x = t_xx + 1e3 * dwell_ns;

    OutcomeProbs o;
    if (fixed) {
      o = *fixed;
    } else if (rng.uniform() < -std::expm1(-params.gamma_s_per_ns * dwell_ns)) {
      // Spin scattered before recombination: unpolarized pair.
      for (auto& row : o.p) row[0] = row[1] = 0.25;
    } else {
      const cplx phase = std::polar(1.0, omega_per_ns * dwell_ns);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          o.p[i][j] = 0.5 * std::norm(hxx[i] * hx[j] + phase * vxx[i] * vx[j]);
    }

    // Joint outcome: does the XX photon pass its analyzer, and which X port.
    const double u = rng.uniform();
    int xx_pass, port;
    if (u < o.p[0][0]) {
      xx_pass = 1; port = 1;
    } else if (u < o.p[0][0] + o.p[0][1]) {
      xx_pass = 1; port = 2;
    } else if (u < o.p[0][0] + o.p[0][1] + o.p[1][0]) {
      xx_pass = 0; port = 1;
    } else {
      xx_pass = 0; port = 2;
    }

    if (xx_pass && rng.uniform() < params.det_eff[0]) emit(0, t_xx);
    if (rng.uniform() < params.det_eff[port]) emit(port, t_x);
    ++k;
  }

  for (int ch = 0; ch < 3; ++ch) {
    if (params.dark_cps[ch] <= 0.0) continue;
    double t_s = rng.exponential(params.dark_cps[ch]);
    while (t_s * 1e12 < duration_ps) {
      out[ch].t_ps.push_back(std::llround(t_s * 1e12));
      t_s += rng.exponential(params.dark_cps[ch]);
    }
  }

  for (auto& s : out) std::sort(s.t_ps.begin(), s.t_ps.end());
  return out;
}

}  // namespace qdc
