#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "qdcascade/density.hpp"
#include "qdcascade/rng.hpp"

namespace qdc {

/// Coincidence counts for the 36 projection settings
/// (XX, X) in {R,L,H,V,D,A}^2.
struct TomoCounts {
  std::array<std::uint64_t, 36> counts{};

  static int index(Basis xx, Basis x) { return 6 * static_cast<int>(xx) + static_cast<int>(x); }
  std::uint64_t& at(Basis xx, Basis x) { return counts[static_cast<std::size_t>(index(xx, x))]; }
  std::uint64_t at(Basis xx, Basis x) const {
    return counts[static_cast<std::size_t>(index(xx, x))];
  }

  /// Expected counts rounded to integers, shots per setting.
  static TomoCounts expected(const DensityMatrix4& rho, double shots);
  /// Poisson counts around shots * p_setting.
  static TomoCounts sample_poisson(const DensityMatrix4& rho, double shots, Rng& rng);

  /// CSV "basis_xx,basis_x,counts", 36 rows (header optional on load).
  /// Load rejects duplicate rows and names any missing setting.
  static TomoCounts load_csv(const std::filesystem::path& p);
  void save_csv(const std::filesystem::path& p) const;
};

/// Stokes-parameter inversion. Hermitian with unit trace by construction but
/// possibly indefinite; used to seed the likelihood fit. Throws when any of
/// the nine basis-pair quadruples has zero total counts.
Mat4 linear_inversion(const TomoCounts& c);

/// rho(T) = T^dagger T / Tr(T^dagger T) for the 16-parameter lower
/// triangular factor (4 real diagonal entries, 6 complex sub-diagonal
/// re/im pairs). Positive semidefinite with unit trace for any finite input.
Mat4 state_from_tparams(const std::array<double, 16>& t);

/// Nearest-physical projection: clip negative eigenvalues, renormalize.
DensityMatrix4 project_physical(const Mat4& m);

struct MleOptions {
  double tol = 1e-10;     // relative objective tolerance
  int max_iter = 100000;  // objective evaluation budget
};

struct MleResult {
  DensityMatrix4 rho;
  double objective = 0.0;          // final L
  double initial_objective = 0.0;  // L at the projected linear-inversion seed
  int evaluations = 0;
};

/// Maximum-likelihood reconstruction over the Cholesky-style
/// parameterization rho(T) = T^dagger T / Tr(T^dagger T) (T lower
/// triangular, 16 real parameters), minimizing
///   L = sum_settings (N p - n)^2 / (2 N p)
/// with the per-basis-pair flux N taken from the four-outcome totals.
/// Nelder-Mead with restarts; the running best never worsens. Throws
/// std::runtime_error when the evaluation budget is exhausted before the
/// tolerance is met (message carries the final objective and spread).
MleResult mle_reconstruct(const TomoCounts& c, const MleOptions& opt = {});

/// Derived quantities reported with a reconstruction.
struct StateSummary {
  double fidelity = 0.0;      // to the Bell state
  double chsh = 0.0;          // S at the standard four basis pairs
  double peres_min = 0.0;     // min partial-transpose eigenvalue
  double concurrence = 0.0;
  double tangle = 0.0;
  double linear_entropy = 0.0;
  double eof = 0.0;
};

StateSummary summarize_state(const DensityMatrix4& rho);

/// S predicted by rho for the standard settings (XX polar angles 0/90,
/// X polar angles 135/45 in the RL-HV plane).
double chsh_from_state(const DensityMatrix4& rho);

std::string summary_to_json(const StateSummary& s);

}  // namespace qdc
