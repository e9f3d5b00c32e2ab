#include "qdcascade/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "qdcascade/analysis.hpp"
#include "qdcascade/eig.hpp"
#include "qdcascade/measures.hpp"

namespace qdc {

namespace {

constexpr std::array<Basis, 6> kBases{Basis::R, Basis::L, Basis::H,
                                      Basis::V, Basis::D, Basis::A};

// Pauli axis k = 1(x),2(y),3(z) -> (plus, minus) analyzer labels.
constexpr Basis kPlus[3] = {Basis::H, Basis::D, Basis::R};
constexpr Basis kMinus[3] = {Basis::V, Basis::A, Basis::L};

Mat2 pauli_by_axis(int k) {
  switch (k) {
    case 0: return pauli::x();
    case 1: return pauli::y();
    default: return pauli::z();
  }
}

double setting_probability(const DensityMatrix4& rho, Basis xx, Basis x) {
  return coincidence_probability(rho, {basis_state(xx), basis_state(x)});
}

}  // namespace

TomoCounts TomoCounts::expected(const DensityMatrix4& rho, double shots) {
  TomoCounts c;
  for (Basis a : kBases)
    for (Basis b : kBases)
      c.at(a, b) = static_cast<std::uint64_t>(
          std::llround(shots * setting_probability(rho, a, b)));
  return c;
}

TomoCounts TomoCounts::sample_poisson(const DensityMatrix4& rho, double shots, Rng& rng) {
  TomoCounts c;
  for (Basis a : kBases)
    for (Basis b : kBases)
      c.at(a, b) = rng.poisson(shots * setting_probability(rho, a, b));
  return c;
}

void TomoCounts::save_csv(const std::filesystem::path& p) const {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  f << "basis_xx,basis_x,counts\n";
  for (Basis a : kBases)
    for (Basis b : kBases)
      f << basis_char(a) << ',' << basis_char(b) << ',' << at(a, b) << '\n';
}

TomoCounts TomoCounts::load_csv(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  TomoCounts c;
  std::array<bool, 36> seen{};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == "basis_xx,basis_x,counts") continue;
    std::istringstream row(line);
    std::string fa, fb, fc;
    if (!std::getline(row, fa, ',') || !std::getline(row, fb, ',') || !std::getline(row, fc))
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) +
                               ": expected basis_xx,basis_x,counts");
    if (fa.size() != 1 || fb.size() != 1)
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": bad basis label");
    const Basis a = basis_from_char(fa[0]);
    const Basis b = basis_from_char(fb[0]);
    const int idx = index(a, b);
    if (seen[static_cast<std::size_t>(idx)])
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": duplicate setting " +
                               fa + fb);
    long long v = 0;
    try {
      std::size_t pos = 0;
      v = std::stoll(fc, &pos);
      if (pos != fc.size()) throw std::invalid_argument("");
    } catch (...) {
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": bad count '" + fc + "'");
    }
    if (v < 0)
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": negative count");
    c.counts[static_cast<std::size_t>(idx)] = static_cast<std::uint64_t>(v);
    seen[static_cast<std::size_t>(idx)] = true;
  }
  for (Basis a : kBases)
    for (Basis b : kBases)
      if (!seen[static_cast<std::size_t>(index(a, b))])
        throw std::runtime_error(p.string() + ": missing setting " +
                                 std::string{basis_char(a)} + basis_char(b));
  return c;
}

Mat4 linear_inversion(const TomoCounts& c) {
  // Two-photon Stokes parameters from the nine basis-pair quadruples.
  double corr[3][3];      // <s_i (x) s_j>
  double single_xx[3]{};  // <s_i (x) I>, averaged over the three X bases
  double single_x[3]{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double npp = static_cast<double>(c.at(kPlus[i], kPlus[j]));
      const double npm = static_cast<double>(c.at(kPlus[i], kMinus[j]));
      const double nmp = static_cast<double>(c.at(kMinus[i], kPlus[j]));
      const double nmm = static_cast<double>(c.at(kMinus[i], kMinus[j]));
      const double total = npp + npm + nmp + nmm;
      if (!(total > 0.0))
        throw std::invalid_argument(std::string("linear_inversion: zero flux in basis pair ") +
                                    basis_char(kPlus[i]) + "/" + basis_char(kPlus[j]));
      corr[i][j] = (npp + nmm - npm - nmp) / total;
      single_xx[i] += (npp + npm - nmp - nmm) / total / 3.0;
      single_x[j] += (npp + nmp - npm - nmm) / total / 3.0;
    }
  }

  Mat4 m = Mat4::identity();
  for (int i = 0; i < 3; ++i) {
    m += cplx(single_xx[i]) * kron(pauli_by_axis(i), pauli::id());
    m += cplx(single_x[i]) * kron(pauli::id(), pauli_by_axis(i));
    for (int j = 0; j < 3; ++j)
      m += cplx(corr[i][j]) * kron(pauli_by_axis(i), pauli_by_axis(j));
  }
  m *= cplx(0.25);
  return m;
}

DensityMatrix4 project_physical(const Mat4& m) {
  const EigHermitian4 e = eig_hermitian4(m, 1e-8);
  double tr = 0.0;
  for (double v : e.values) tr += std::max(0.0, v);
  if (!(tr > 0.0)) throw std::invalid_argument("project_physical: no positive weight");
  Mat4 d;
  for (int i = 0; i < 4; ++i) d(i, i) = std::max(0.0, e.values[i]) / tr;
  return DensityMatrix4(e.vectors * d * e.vectors.adjoint());
}

// rho(t) = T^dagger T / Tr, T lower triangular from 16 reals:
// diagonal t0..t3, sub-diagonals as re/im pairs.
Mat4 state_from_tparams(const std::array<double, 16>& t) {
  Mat4 T;
  T(0, 0) = t[0];
  T(1, 1) = t[1];
  T(2, 2) = t[2];
  T(3, 3) = t[3];
  T(1, 0) = cplx(t[4], t[5]);
  T(2, 1) = cplx(t[6], t[7]);
  T(3, 2) = cplx(t[8], t[9]);
  T(2, 0) = cplx(t[10], t[11]);
  T(3, 1) = cplx(t[12], t[13]);
  T(3, 0) = cplx(t[14], t[15]);
  Mat4 m = T.adjoint() * T;
  const double tr = m.trace().real();
  if (!(tr > 1e-300)) {
    // Degenerate parameter point; fall back to the maximally mixed state.
    return 0.25 * Mat4::identity();
  }
  m *= cplx(1.0 / tr);
  return m;
}

namespace {

// Lower-triangular T with T^dagger T = m (m strictly positive definite):
// Cholesky in the index-reversed basis.
std::array<double, 16> tparams_from_state(const Mat4& m) {
  Mat4 rev;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) rev(r, c) = m(3 - r, 3 - c);
  // Standard Cholesky rev = L L^dagger.
  Mat4 L;
  for (int j = 0; j < 4; ++j) {
    cplx diag = rev(j, j);
    for (int k = 0; k < j; ++k) diag -= L(j, k) * std::conj(L(j, k));
    const double d = std::sqrt(std::max(1e-300, diag.real()));
    L(j, j) = d;
    for (int i = j + 1; i < 4; ++i) {
      cplx s = rev(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * std::conj(L(j, k));
      L(i, j) = s / d;
    }
  }
  // T = (J L J)^dagger is lower triangular and satisfies T^dagger T = m.
  Mat4 T;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) T(r, c) = std::conj(L(3 - c, 3 - r));
  return {T(0, 0).real(), T(1, 1).real(), T(2, 2).real(), T(3, 3).real(),
          T(1, 0).real(), T(1, 0).imag(), T(2, 1).real(), T(2, 1).imag(),
          T(3, 2).real(), T(3, 2).imag(), T(2, 0).real(), T(2, 0).imag(),
          T(3, 1).real(), T(3, 1).imag(), T(3, 0).real(), T(3, 0).imag()};
}

struct Objective {
  std::array<Vec4, 36> kets;
  std::array<double, 36> counts;
  std::array<double, 36> flux;  // per-setting N from its basis-pair quadruple
  mutable int evaluations = 0;

  explicit Objective(const TomoCounts& c) {
    for (Basis a : kBases)
      for (Basis b : kBases) {
        const int idx = TomoCounts::index(a, b);
        kets[static_cast<std::size_t>(idx)] = two_photon_ket(basis_state(a), basis_state(b));
        counts[static_cast<std::size_t>(idx)] = static_cast<double>(c.at(a, b));
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double total = static_cast<double>(
            c.at(kPlus[i], kPlus[j]) + c.at(kPlus[i], kMinus[j]) +
            c.at(kMinus[i], kPlus[j]) + c.at(kMinus[i], kMinus[j]));
        const Basis as[2] = {kPlus[i], kMinus[i]};
        const Basis bs[2] = {kPlus[j], kMinus[j]};
        for (Basis a : as)
          for (Basis b : bs) flux[static_cast<std::size_t>(TomoCounts::index(a, b))] = total;
      }
  }

  double operator()(const std::array<double, 16>& t) const {
    ++evaluations;
    const Mat4 rho = state_from_tparams(t);
    double loss = 0.0;
    for (int v = 0; v < 36; ++v) {
      const double p = std::max(1e-12, expectation(kets[v], rho).real());
      const double d = flux[v] * p - counts[v];
      loss += d * d / (2.0 * flux[v] * p);
    }
    return loss;
  }
};

struct SimplexState {
  std::array<double, 16> best_x;
  double best_f = 0.0;
  double spread = 0.0;  // f_worst - f_best at exit, the stationarity measure
};

// Nelder-Mead over the 16 parameters, standard coefficients. Runs until the
// simplex spread drops under tol or the evaluation budget is spent; the best
// vertex is monotone by construction.
SimplexState nelder_mead(const Objective& f, std::array<double, 16> x0, double step,
                         double tol, int max_eval) {
  constexpr int n = 16;
  std::vector<std::array<double, n>> x(n + 1, x0);
  std::vector<double> fx(n + 1);
  for (int i = 1; i <= n; ++i) x[static_cast<std::size_t>(i)][i - 1] += step;
  for (int i = 0; i <= n; ++i) fx[static_cast<std::size_t>(i)] = f(x[static_cast<std::size_t>(i)]);

  auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fx[static_cast<std::size_t>(a)] < fx[static_cast<std::size_t>(b)]; });
    std::vector<std::array<double, n>> x2;
    std::vector<double> f2;
    x2.reserve(n + 1);
    f2.reserve(n + 1);
    for (int i : idx) {
      x2.push_back(x[static_cast<std::size_t>(i)]);
      f2.push_back(fx[static_cast<std::size_t>(i)]);
    }
    x.swap(x2);
    fx.swap(f2);
  };

  while (f.evaluations < max_eval) {
    order();
    if (fx[n] - fx[0] <= tol * (1.0 + std::abs(fx[0]))) break;

    std::array<double, n> centroid{};
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < n; ++d) centroid[d] += x[static_cast<std::size_t>(i)][d] / n;

    auto blend = [&](double coef) {
      std::array<double, n> p;
      for (int d = 0; d < n; ++d) p[d] = centroid[d] + coef * (x[n][d] - centroid[d]);
      return p;
    };

    const auto xr = blend(-1.0);  // reflection
    const double fr = f(xr);
    if (fr < fx[0]) {
      const auto xe = blend(-2.0);  // expansion
      const double fe = f(xe);
      if (fe < fr) {
        x[n] = xe;
        fx[n] = fe;
      } else {
        x[n] = xr;
        fx[n] = fr;
      }
    } else if (fr < fx[n - 1]) {
      x[n] = xr;
      fx[n] = fr;
    } else {
      const auto xc = blend(fr < fx[n] ? -0.5 : 0.5);  // contraction
      const double fc = f(xc);
      if (fc < std::min(fr, fx[n])) {
        x[n] = xc;
        fx[n] = fc;
      } else {  // shrink towards the best vertex
        for (int i = 1; i <= n; ++i) {
          for (int d = 0; d < n; ++d)
            x[static_cast<std::size_t>(i)][d] = 0.5 * (x[static_cast<std::size_t>(i)][d] + x[0][d]);
          fx[static_cast<std::size_t>(i)] = f(x[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
  order();
  return {x[0], fx[0], fx[n] - fx[0]};
}

}  // namespace

MleResult mle_reconstruct(const TomoCounts& c, const MleOptions& opt) {
  const Objective obj(c);

  // Seed from the physicality-projected linear inversion, mixed with a
  // sliver of I/4 so the Cholesky factor exists.
  const DensityMatrix4 projected = project_physical(linear_inversion(c));
  Mat4 seed = projected.matrix();
  seed *= cplx(1.0 - 1e-6);
  seed += (1e-6 * 0.25) * Mat4::identity();
  std::array<double, 16> t = tparams_from_state(seed);

  SimplexState best{t, obj(t), 0.0};
  const double initial = best.best_f;
  double step = 0.05;
  double last_spread = 0.0;
  for (int round = 0; round < 48 && obj.evaluations < opt.max_iter; ++round) {
    const double before = best.best_f;
    const SimplexState s = nelder_mead(obj, best.best_x, step, opt.tol, opt.max_iter);
    last_spread = s.spread;
    if (s.best_f < best.best_f) best = s;
    const bool converged = before - best.best_f <= opt.tol * (1.0 + std::abs(best.best_f));
    if (round > 0 && converged) {
      return {DensityMatrix4(state_from_tparams(best.best_x)), best.best_f, initial,
              obj.evaluations};
    }
    step *= 0.5;
  }
  std::ostringstream msg;
  msg << "mle_reconstruct: no convergence within " << opt.max_iter << " evaluations (objective "
      << best.best_f << ", simplex spread " << last_spread << ")";
  throw std::runtime_error(msg.str());
}

double chsh_from_state(const DensityMatrix4& rho) {
  auto correlation = [&](double theta_a, double theta_b) {
    const PolState a = state_from_angles({theta_a, 0.0});
    const PolState b = state_from_angles({theta_b, 0.0});
    const PolState ap = orthogonal(a), bp = orthogonal(b);
    const double pp = coincidence_probability(rho, {a, b});
    const double pm = coincidence_probability(rho, {a, bp});
    const double mp = coincidence_probability(rho, {ap, b});
    const double mm = coincidence_probability(rho, {ap, bp});
    return (pp + mm - pm - mp) / (pp + pm + mp + mm);
  };
  // a = 0, a' = 90; b = 135, b' = 45 maximizes |S| for the target state.
  return chsh_s({correlation(0.0, 135.0), correlation(0.0, 45.0),
                 correlation(90.0, 135.0), correlation(90.0, 45.0)});
}

StateSummary summarize_state(const DensityMatrix4& rho) {
  StateSummary s;
  s.fidelity = fidelity_to_bell(rho);
  s.chsh = chsh_from_state(rho);
  s.peres_min = peres_min_eigenvalue(rho);
  s.concurrence = concurrence(rho);
  s.tangle = s.concurrence * s.concurrence;
  s.linear_entropy = linear_entropy(rho);
  s.eof = eof_from_tangle(s.tangle);
  return s;
}

std::string summary_to_json(const StateSummary& s) {
  nlohmann::json j;
  j["fidelity"] = s.fidelity;
  j["chsh_s"] = s.chsh;
  j["peres_min_eigenvalue"] = s.peres_min;
  j["concurrence"] = s.concurrence;
  j["tangle"] = s.tangle;
  j["linear_entropy"] = s.linear_entropy;
  j["entanglement_of_formation"] = s.eof;
  return j.dump();
}

}  // namespace qdc
