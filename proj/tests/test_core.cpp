#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "qdcascade/density.hpp"
#include "qdcascade/eig.hpp"
#include "qdcascade/measures.hpp"
#include "qdcascade/polarization.hpp"
#include "qdcascade/rng.hpp"

using namespace qdc;

namespace {

double state_distance(const PolState& a, const PolState& b) {
  return std::max(std::abs(a.amp_r() - b.amp_r()), std::abs(a.amp_l() - b.amp_l()));
}

Mat4 random_hermitian(Rng& rng) {
  Mat4 b;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) b(r, c) = cplx(rng.gaussian(), rng.gaussian());
  Mat4 h;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) h(r, c) = 0.5 * (b(r, c) + std::conj(b(c, r)));
  return h;
}

DensityMatrix4 random_density(Rng& rng) {
  Mat4 b;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) b(r, c) = cplx(rng.gaussian(), rng.gaussian());
  Mat4 m = b * b.adjoint();
  m *= cplx(1.0 / m.trace().real());
  return DensityMatrix4(m);
}

// Independent eigenvalue oracle: characteristic polynomial coefficients by
// Faddeev-LeVerrier, roots by Durand-Kerner. Shares no code with the Jacobi
// implementation under test.
std::array<double, 4> charpoly_roots(const Mat4& m) {
  const Mat4 eye = Mat4::identity();
  const cplx c3 = -m.trace();
  const Mat4 m2 = m * (m + c3 * eye);
  const cplx c2 = -m2.trace() / 2.0;
  const Mat4 m3 = m * (m2 + c2 * eye);
  const cplx c1 = -m3.trace() / 3.0;
  const Mat4 m4 = m * (m3 + c1 * eye);
  const cplx c0 = -m4.trace() / 4.0;
  auto p = [&](cplx x) { return (((x + c3) * x + c2) * x + c1) * x + c0; };

  std::array<cplx, 4> z;
  z[0] = cplx(0.4, 0.9);
  for (int i = 1; i < 4; ++i) z[i] = z[i - 1] * cplx(0.4, 0.9);
  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0;
    for (int i = 0; i < 4; ++i) {
      cplx denom = 1.0;
      for (int j = 0; j < 4; ++j)
        if (j != i) denom *= z[i] - z[j];
      const cplx step = p(z[i]) / denom;
      z[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-14) break;
  }
  std::array<double, 4> roots;
  for (int i = 0; i < 4; ++i) roots[i] = z[i].real();
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

}  // namespace

TEST_CASE("cardinal states sit at their sphere angles") {
  CHECK(state_distance(state_from_angles({0, 0}), PolState::R()) < 1e-14);
  CHECK(state_distance(state_from_angles({180, 0}), PolState::L()) < 1e-14);
  CHECK(state_distance(state_from_angles({90, 0}), PolState::H()) < 1e-14);
  CHECK(state_distance(state_from_angles({270, 0}), PolState::V()) < 1e-14);
  CHECK(state_distance(state_from_angles({90, 90}), PolState::D()) < 1e-14);
  CHECK(state_distance(state_from_angles({90, 270}), PolState::A()) < 1e-14);
}

TEST_CASE("theta=90 phi=90 lands on D: direct linear-basis evaluation") {
  // Oracle: expand |psi> = (|R> + i|L>)/sqrt2 in H/V amplitudes with the
  // fixed conventions and project onto (|H>+|V>)/sqrt2 by 2x2 arithmetic.
  const cplx r(1.0 / std::sqrt(2.0)), l(0.0, 1.0 / std::sqrt(2.0));
  const cplx h = (r + l) / std::sqrt(2.0);               // <H|psi>
  const cplx v = cplx(0, 1) * (r - l) / std::sqrt(2.0);  // <V|psi>
  const cplx d = (h + v) / std::sqrt(2.0);               // <D|psi>
  CHECK(std::norm(d) == doctest::Approx(1.0).epsilon(1e-12));

  const PolState psi = state_from_angles({90, 90});
  CHECK(std::norm(overlap(PolState::D(), psi)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("global phase convention makes states comparable") {
  const PolState a(cplx(0.3, 0.4), cplx(0.5, -0.2));
  const PolState b(cplx(0.3, 0.4) * std::polar(1.0, 2.13), cplx(0.5, -0.2) * std::polar(1.0, 2.13));
  CHECK(state_distance(a, b) < 1e-14);
  CHECK(a.amp_r().imag() == 0.0);
  CHECK(a.amp_r().real() >= 0.0);
  CHECK(std::abs(std::norm(a.amp_r()) + std::norm(a.amp_l()) - 1.0) < 1e-12);
}

TEST_CASE("orthogonal complement") {
  CHECK(state_distance(orthogonal(PolState::R()), PolState::L()) < 1e-14);
  CHECK(state_distance(orthogonal(PolState::H()), PolState::V()) < 1e-14);
  CHECK(state_distance(orthogonal(PolState::D()), PolState::A()) < 1e-14);
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const PolState s(cplx(rng.gaussian(), rng.gaussian()), cplx(rng.gaussian(), rng.gaussian()));
    CHECK(std::abs(overlap(orthogonal(s), s)) < 1e-14);
  }
}

TEST_CASE("zero amplitude is rejected") {
  CHECK_THROWS_AS(PolState(cplx(0.0), cplx(0.0)), std::invalid_argument);
}

TEST_CASE("bell state: circular and linear forms coincide") {
  const Vec4 psi = bell_psi_ket();
  // (|HH> + |VV>)/sqrt2 expanded in the circular product basis.
  const Vec4 hh{cplx(0.5), cplx(0.5), cplx(0.5), cplx(0.5)};
  const Vec4 vv{cplx(-0.5), cplx(0.5), cplx(0.5), cplx(-0.5)};
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(psi[i] - (hh[i] + vv[i]) / std::sqrt(2.0)) < 1e-14);

  CHECK(fidelity_to_bell(bell_psi()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bell state coincidence probabilities") {
  const DensityMatrix4 rho = bell_psi();
  auto p = [&](const PolState& a, const PolState& b) {
    return coincidence_probability(rho, {a, b});
  };
  CHECK(p(PolState::R(), PolState::R()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p(PolState::L(), PolState::L()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p(PolState::L(), PolState::R()) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p(PolState::H(), PolState::H()) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p(PolState::H(), PolState::V()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p(PolState::D(), PolState::D()) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("werner family") {
  CHECK(max_abs_diff(werner(1.0).matrix(), bell_psi().matrix()) < 1e-14);

  const DensityMatrix4 mixed = werner(0.0);
  for (const PolState& a : {PolState::R(), PolState::H(), PolState::D()})
    for (const PolState& b : {PolState::R(), PolState::H(), PolState::D()})
      CHECK(coincidence_probability(mixed, {a, b}) == doctest::Approx(0.25).epsilon(1e-12));

  CHECK(fidelity_to_bell(mixed) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(fidelity_to_bell(werner(0.8133333333333334)) == doctest::Approx(0.86).epsilon(1e-9));
  CHECK_THROWS_AS(werner(1.01), std::invalid_argument);
  CHECK_THROWS_AS(werner(-0.34), std::invalid_argument);
}

TEST_CASE("werner closed form for coincidences in the RL-HV plane") {
  const double v = 0.63;
  const DensityMatrix4 rho = werner(v);
  Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    const double ta = 360.0 * rng.uniform();
    const double tb = 360.0 * rng.uniform();
    const MeasurementSetting s{state_from_angles({ta, 0}), state_from_angles({tb, 0})};
    const double expected = (1.0 - v * std::cos((ta + tb) * std::numbers::pi / 180.0)) / 4.0;
    CHECK(coincidence_probability(rho, s) == doctest::Approx(expected).epsilon(1e-10));
  }
  // (R, R) with the polar angles at zero.
  CHECK(coincidence_probability(rho, {PolState::R(), PolState::R()}) ==
        doctest::Approx((1.0 - v) / 4.0).epsilon(1e-12));
}

TEST_CASE("coincidence completeness over orthogonal bases") {
  Rng rng(3);
  for (int i = 0; i < 25; ++i) {
    const DensityMatrix4 rho = random_density(rng);
    const PolState a(cplx(rng.gaussian(), rng.gaussian()), cplx(rng.gaussian(), rng.gaussian()));
    const PolState b(cplx(rng.gaussian(), rng.gaussian()), cplx(rng.gaussian(), rng.gaussian()));
    const PolState ap = orthogonal(a), bp = orthogonal(b);
    double sum = 0.0;
    for (const PolState& x : {a, ap})
      for (const PolState& y : {b, bp}) sum += coincidence_probability(rho, {x, y});
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("bell-diagonal constructor reproduces the measured-visibility state") {
  CHECK(max_abs_diff(bell_diagonal_from_visibilities(1, 1, 1).matrix(), bell_psi().matrix()) <
        1e-14);

  const DensityMatrix4 rho = bell_diagonal_from_visibilities(0.87, 0.78, 0.77);
  CHECK(fidelity_to_bell(rho) == doctest::Approx(0.855).epsilon(1e-12));

  // Min partial-transpose eigenvalue against the independent quartic oracle.
  const auto roots = charpoly_roots(partial_transpose(rho.matrix()));
  CHECK(roots[3] == doctest::Approx((1.0 - 0.87 - 0.78 - 0.77) / 4.0).epsilon(1e-9));
  CHECK(peres_min_eigenvalue(rho) == doctest::Approx(-0.355).epsilon(1e-9));

  CHECK_THROWS_AS(bell_diagonal_from_visibilities(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bell_diagonal_from_visibilities(1.2, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("fidelity identity of the bell-diagonal family") {
  Rng rng(5);
  int accepted = 0;
  while (accepted < 60) {
    const double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
    try {
      const DensityMatrix4 rho = bell_diagonal_from_visibilities(a, b, c);
      CHECK(std::abs(fidelity_to_bell(rho) - 0.25 * (1.0 + a + b + c)) < 1e-12);
      ++accepted;
    } catch (const std::invalid_argument&) {
      // unphysical visibility combination, draw again
    }
  }
}

TEST_CASE("eigensolver basics") {
  const auto iso = eig_hermitian4(0.25 * Mat4::identity());
  for (double v : iso.values) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

  const auto bell = eig_hermitian4(bell_psi().matrix());
  CHECK(bell.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(bell.values[i]) < 1e-12);

  Mat4 bad = Mat4::identity();
  bad(0, 1) = cplx(0.0, 0.5);  // not mirrored below
  CHECK_THROWS_AS(eig_hermitian4(bad), std::invalid_argument);
}

TEST_CASE("eigensolver on 1000 seeded random Hermitian matrices") {
  Rng rng(20240917);
  double worst_residual = 0.0;
  double worst_root_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Mat4 m = random_hermitian(rng);
    const EigHermitian4 e = eig_hermitian4(m);
    worst_residual = std::max(worst_residual, eig_residual(m, e));
    CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
    // Cross-check the spectrum against the characteristic polynomial roots.
    if (i % 10 == 0) {
      const auto roots = charpoly_roots(m);
      for (int k = 0; k < 4; ++k)
        worst_root_gap = std::max(worst_root_gap, std::abs(roots[k] - e.values[k]));
    }
    // Column orthonormality.
    const Mat4 g = e.vectors.adjoint() * e.vectors;
    CHECK(max_abs_diff(g, Mat4::identity()) < 1e-12);
  }
  CHECK(worst_residual <= 1e-9);
  CHECK(worst_root_gap <= 1e-8);
}

TEST_CASE("peres criterion") {
  CHECK(peres_min_eigenvalue(bell_psi()) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(peres_min_eigenvalue(werner(0.0)) == doctest::Approx(0.25).epsilon(1e-12));
  for (double v : {0.0, 0.25, 0.5, 0.8133, 1.0})
    CHECK(std::abs(peres_min_eigenvalue(werner(v)) - (1.0 - 3.0 * v) / 4.0) < 1e-9);
}

TEST_CASE("entanglement measures at the extremes") {
  const DensityMatrix4 bell = bell_psi();
  CHECK(concurrence(bell) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tangle(bell) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(entanglement_of_formation(bell) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(linear_entropy(bell)) < 1e-12);

  const DensityMatrix4 mixed = werner(0.0);
  CHECK(concurrence(mixed) == doctest::Approx(0.0));
  CHECK(tangle(mixed) == doctest::Approx(0.0));
  CHECK(entanglement_of_formation(mixed) == doctest::Approx(0.0));
  CHECK(linear_entropy(mixed) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("werner concurrence closed form") {
  for (double v = 0.0; v <= 1.0; v += 0.05)
    CHECK(std::abs(concurrence(werner(v)) - std::max(0.0, (3.0 * v - 1.0) / 2.0)) < 1e-9);
}

TEST_CASE("measure triple consistency at tangle 0.53") {
  const double ef = eof_from_tangle(0.53);
  CHECK(ef == doctest::Approx(binary_entropy(0.5 * (1.0 + std::sqrt(0.47)))).epsilon(1e-14));
  CHECK(std::abs(ef - 0.63) < 0.005);
}

TEST_CASE("entanglement of formation is monotone in concurrence") {
  double prev_c = -1.0, prev_ef = -1.0;
  for (double v = 0.34; v <= 1.0; v += 0.02) {
    const DensityMatrix4 rho = werner(v);
    const double c = concurrence(rho);
    const double ef = entanglement_of_formation(rho);
    if (prev_c >= 0.0 && c > prev_c) CHECK(ef >= prev_ef - 1e-12);
    prev_c = c;
    prev_ef = ef;
  }
}

TEST_CASE("constructor outputs satisfy the density-matrix invariants") {
  Rng rng(99);
  auto check_state = [](const DensityMatrix4& rho) {
    CHECK(is_hermitian(rho.matrix(), 1e-10));
    CHECK(std::abs(rho.matrix().trace() - cplx(1.0)) < 1e-10);
    CHECK(eig_hermitian4(rho.matrix()).values[3] >= -1e-9);
  };
  check_state(bell_psi());
  for (int i = 0; i < 20; ++i) check_state(werner(-1.0 / 3.0 + (4.0 / 3.0) * rng.uniform()));
  check_state(bell_diagonal_from_visibilities(0.87, 0.78, 0.77));
}

TEST_CASE("density matrix validation rejects bad input") {
  Mat4 m = bell_psi().matrix();
  m(0, 1) = cplx(0.2, 0.1);
  CHECK_THROWS_AS((void)DensityMatrix4{m}, std::invalid_argument);

  Mat4 scaled = bell_psi().matrix();
  scaled *= cplx(1.5);
  CHECK_THROWS_AS((void)DensityMatrix4{scaled}, std::invalid_argument);

  Mat4 indefinite = Mat4::identity();
  indefinite(3, 3) = -0.5;
  indefinite(0, 0) = 1.5;
  indefinite *= cplx(0.5);
  CHECK_THROWS_AS((void)DensityMatrix4{indefinite}, std::invalid_argument);
}

TEST_CASE("uhlmann fidelity") {
  CHECK(state_fidelity(bell_psi(), bell_psi()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(state_fidelity(bell_psi(), werner(0.0)) == doctest::Approx(0.25).epsilon(1e-9));
  Rng rng(42);
  const DensityMatrix4 a = random_density(rng);
  const DensityMatrix4 b = random_density(rng);
  const double fab = state_fidelity(a, b);
  CHECK(fab == doctest::Approx(state_fidelity(b, a)).epsilon(1e-8));
  CHECK(fab >= 0.0);
  CHECK(fab <= 1.0 + 1e-10);
}

TEST_CASE("density serialization round-trips bit-exactly") {
  Rng rng(314);
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix4 rho = random_density(rng);
    const DensityMatrix4 back = density_from_json(density_to_json(rho));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        CHECK(rho(r, c).real() == back(r, c).real());
        CHECK(rho(r, c).imag() == back(r, c).imag());
      }
  }
  CHECK_THROWS(density_from_json("{\"basis_order\":\"LL,LR,RL,RR\",\"re\":[],\"im\":[]}"));
}
