#include "qdcascade/cascade.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qdc {

void CascadeParams::validate() const {
  if (!(gamma1_per_ns > 0.0)) throw std::invalid_argument("params: gamma1 must be > 0");
  if (!(gamma_xx_per_ns > 0.0)) throw std::invalid_argument("params: gamma_xx must be > 0");
  if (gamma_s_per_ns < 0.0) throw std::invalid_argument("params: gamma_s must be >= 0");
  if (!(rep_rate_mhz > 0.0)) throw std::invalid_argument("params: rep_rate must be > 0");
  if (!(p_exc >= 0.0 && p_exc <= 1.0)) throw std::invalid_argument("params: p_exc outside [0, 1]");
  for (double e : det_eff)
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("params: det_eff outside [0, 1]");
  if (jitter_ps < 0.0) throw std::invalid_argument("params: jitter must be >= 0");
  for (double d : dark_cps)
    if (d < 0.0) throw std::invalid_argument("params: dark rate must be >= 0");
}

DensityMatrix4 ensemble_state(const CascadeParams& p) {
  if (!(p.gamma1_per_ns > 0.0)) throw std::invalid_argument("ensemble_state: gamma1 must be > 0");
  const double g = p.gamma1_per_ns + p.gamma_s_per_ns;
  const double w = p.gamma1_per_ns / g;                       // coherent-part weight
  const cplx zeta = p.gamma1_per_ns / cplx(g, p.fss_uev / kHbarUevNs);

  // |HH> and |VV> in the circular product basis.
  const Vec4 hh{cplx(0.5), cplx(0.5), cplx(0.5), cplx(0.5)};
  const Vec4 vv{cplx(-0.5), cplx(0.5), cplx(0.5), cplx(-0.5)};

  Mat4 m = (0.5 * w) * (outer(hh, hh) + outer(vv, vv));
  m += (0.5 * zeta) * outer(hh, vv);
  m += (0.5 * std::conj(zeta)) * outer(vv, hh);
  m += (0.25 * (1.0 - w)) * Mat4::identity();
  return DensityMatrix4(m);
}

double pl_decay(const CascadeParams& p, double t_ns) {
  if (t_ns < 0.0) throw std::invalid_argument("pl_decay: t must be >= 0");
  return std::exp(-p.gamma1_per_ns * t_ns);
}

double dcp_curve(const CascadeParams& p, double t_ns) {
  if (t_ns < 0.0) throw std::invalid_argument("dcp_curve: t must be >= 0");
  return std::exp(-p.gamma_s_per_ns * t_ns);
}

// ---- flat key=value config ----------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const KvMap& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + it->second + "'");
  }
}

}  // namespace

KvMap parse_kv(const std::string& text) {
  KvMap kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KvMap load_kv(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot open config " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_kv(ss.str());
}

void apply_params_kv(const KvMap& kv, CascadeParams& p) {
  p.gamma1_per_ns = to_double(kv, "gamma1_per_ns", p.gamma1_per_ns);
  p.gamma_xx_per_ns = to_double(kv, "gamma_xx_per_ns", p.gamma_xx_per_ns);
  p.gamma_s_per_ns = to_double(kv, "gamma_s_per_ns", p.gamma_s_per_ns);
  p.fss_uev = to_double(kv, "fss_uev", p.fss_uev);
  p.rep_rate_mhz = to_double(kv, "rep_rate_mhz", p.rep_rate_mhz);
  p.p_exc = to_double(kv, "p_exc", p.p_exc);
  for (int i = 0; i < 3; ++i) {
    p.det_eff[i] = to_double(kv, "det_eff" + std::to_string(i), p.det_eff[i]);
    p.dark_cps[i] = to_double(kv, "dark_cps" + std::to_string(i), p.dark_cps[i]);
  }
  p.jitter_ps = to_double(kv, "jitter_ps", p.jitter_ps);
}

std::string params_to_kv(const CascadeParams& p) {
  std::ostringstream s;
  s.precision(17);
  s << "gamma1_per_ns=" << p.gamma1_per_ns << '\n'
    << "gamma_xx_per_ns=" << p.gamma_xx_per_ns << '\n'
    << "gamma_s_per_ns=" << p.gamma_s_per_ns << '\n'
    << "fss_uev=" << p.fss_uev << '\n'
    << "rep_rate_mhz=" << p.rep_rate_mhz << '\n'
    << "p_exc=" << p.p_exc << '\n';
  for (int i = 0; i < 3; ++i) s << "det_eff" << i << '=' << p.det_eff[i] << '\n';
  s << "jitter_ps=" << p.jitter_ps << '\n';
  for (int i = 0; i < 3; ++i) s << "dark_cps" << i << '=' << p.dark_cps[i] << '\n';
  return s.str();
}

}  // namespace qdc
