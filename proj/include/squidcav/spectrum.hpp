#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "squidcav/constants.hpp"
#include "squidcav/errors.hpp"

namespace squidcav {

/// Device constants of one rf SQUID (strict SI).
struct SquidParams {
  double capacitance = 90e-15;       ///< junction capacitance C (F)
  double inductance = 100e-12;       ///< loop inductance L (H)
  double critical_current = 3.75e-6; ///< junction critical current I_c (A)
  double phix_ratio = 0.4995;        ///< external flux bias Phi_x / Phi_0

  /// Josephson coupling energy E_J = I_c * Phi_0 / (2 pi), in joules.
  [[nodiscard]] double josephson_energy() const {
    return critical_current * constants::phi_0 / (2.0 * constants::pi);
  }

  /// Dimensionless screening parameter beta_L = 2 pi L I_c / Phi_0
  /// (beta_L > 1 implies a double-well flux potential).
  [[nodiscard]] double beta_l() const {
    return 2.0 * constants::pi * inductance * critical_current / constants::phi_0;
  }

  void validate() const;
};

/// Flux-grid discretization controls for the stationary solver.
struct GridConfig {
  int num_points = 512;           ///< uniform flux grid size (>= 64)
  double halfwidth_phi0 = 0.35;   ///< half-width of the domain, units of Phi_0
  /// Index of the eigenstate used as the intermediate level |a> of the Lambda
  /// configuration. Defaults to the second excited state; when that choice
  /// fails the Lambda validity check the solver error lists ranked
  /// candidates so a caller can select one here explicitly.
  int level_a_index = 2;
  /// Re-solve at doubled grid size and require the |0> -> |a> splitting to be
  /// stable to 1e-6 relative (cheap; disable only inside wide sweeps).
  bool check_convergence = true;

  void validate() const;
};

/// Output of the stationary flux-Hamiltonian solve: the lowest eigenpairs,
/// the Lambda-level assignment, and the flux matrix elements that feed every
/// coupling constant downstream.
struct SpectrumResult {
  std::vector<double> energies;     ///< E_k in joules, strictly increasing
  Eigen::MatrixXd eigenvectors;     ///< grid-sampled wavefunctions, one column per level
  std::vector<double> grid_flux;    ///< flux samples Phi_i (Wb)

  int index_0 = 0;                  ///< eigenstate index of qubit level |0>
  int index_1 = 1;                  ///< eigenstate index of qubit level |1>
  int index_a = 2;                  ///< eigenstate index of intermediate level |a>

  double omega_10 = 0.0;            ///< (E_1 - E_0)/hbar, rad/s
  double omega_a1 = 0.0;            ///< (E_a - E_1)/hbar, rad/s
  double omega_a0 = 0.0;            ///< omega_a1 + omega_10 (identity by construction)

  /// <i|Phi|j> in webers for i,j in {0,1,a} (indices 0,1,2 of this matrix).
  Eigen::Matrix3d flux_me = Eigen::Matrix3d::Zero();

  std::vector<double> mean_flux;    ///< <Phi> per computed level (Wb)

  int grid_points = 0;              ///< grid size used
  double est_rel_error = 0.0;       ///< relative shift of E_a - E_0 on grid doubling

  bool lambda_valid = false;        ///< both Lambda legs above threshold
  /// Candidate |a> indices (2..5) ranked by Lambda-coupling strength
  /// (descending min leg |<0|Phi|k>|, |<1|Phi|k>|).
  std::vector<std::pair<int, double>> lambda_candidates;
};

/// Solve the 1D stationary problem for the rf-SQUID flux Hamiltonian
///   H = -(hbar^2 / 2C) d^2/dPhi^2 + (Phi - Phi_x)^2 / 2L - E_J cos(2 pi Phi / Phi_0)
/// with a Fourier-grid (spectral) discretization on a uniform periodic grid
/// centered at Phi_x. The junction capacitance plays the role of the mass.
///
/// Throws NumericError when an eigenfunction used for matrix elements leaks
/// at the domain boundary (tail above 1e-8 of its peak) or when the grid-
/// doubling check shows the |0> -> |a> splitting unconverged; throws
/// ConfigError when the |a> selection fails the Lambda validity check (the
/// message carries the ranked candidates).
[[nodiscard]] SpectrumResult solve_squid_spectrum(const SquidParams& params,
                                                  const GridConfig& grid,
                                                  int n_levels = 6);

/// Bare spectral solve: the lowest `n_levels` eigenenergies (J) and the flux
/// matrix elements <i|Phi|j> (Wb) over those levels, with no Lambda-level
/// assignment or validity gating (grid.level_a_index is ignored). Ordering
/// and boundary-leak checks still apply to every returned level. This is the
/// entry point for analytic-limit validation — e.g. I_c = 0, where the
/// spectrum is the exact LC ladder but no Lambda configuration exists — and
/// for level-structure surveys outside the qubit operating regime.
struct FluxSpectrum {
  std::vector<double> energies;  ///< E_k in joules, strictly increasing
  Eigen::MatrixXd flux_me;       ///< <i|Phi|j> in webers, n_levels x n_levels
};

[[nodiscard]] FluxSpectrum solve_flux_spectrum(const SquidParams& params,
                                               const GridConfig& grid,
                                               int n_levels = 6);

/// U(Phi) sampled on `samples` uniform points across the grid domain.
[[nodiscard]] std::vector<std::pair<double, double>> potential_profile(
    const SquidParams& params, const GridConfig& grid, int samples);

/// Number of local minima of a sampled profile (helper for well counting).
[[nodiscard]] int count_local_minima(
    const std::vector<std::pair<double, double>>& profile);

}  // namespace squidcav
