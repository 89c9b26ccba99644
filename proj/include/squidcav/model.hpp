#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "squidcav/spectrum.hpp"

namespace squidcav {

using cplx = std::complex<double>;

/// Cavity mode description (all frequencies angular, rad/s).
struct CavityParams {
  double omega_c = 0.0;          ///< mode angular frequency (rad/s)
  double g = 0.0;                ///< SQUID-cavity coupling constant (rad/s)
  int n_max = 5;                 ///< Fock-space truncation (photon numbers 0..n_max)
  std::optional<double> quality; ///< cavity quality factor Q_c

  void validate() const;
};

/// One classical microwave drive (one per SQUID).
struct DriveParams {
  double omega_rabi = 0.0;  ///< Rabi frequency Omega (rad/s)
  double omega_uw = 0.0;    ///< microwave angular frequency (rad/s)

  void validate() const;
};

/// Scalar surface integrals of the magnetic fields over the SQUID loop.
struct CouplingInputs {
  double bc_integral = 0.0;   ///< integral of B_c . dS (T m^2), cavity mode
  double buw_integral = 0.0;  ///< integral of B_uw . dS (T m^2), microwave pulse
};

/// Derived parameters of the dispersive (adiabatic-elimination) regime. The
/// defining inputs are stored alongside so every derived field can be
/// recomputed and checked against its formula.
struct EffectiveParams {
  // stored inputs
  double g = 0.0;         ///< cavity coupling (rad/s)
  double omega_rabi = 0.0;///< drive Rabi frequency (rad/s)
  double delta_c = 0.0;   ///< cavity detuning Delta_c = omega_a0 - omega_c (rad/s)
  double delta_uw = 0.0;  ///< drive detuning Delta_uw = omega_a1 - omega_uw (rad/s)
  // derived
  double delta = 0.0;        ///< two-photon detuning delta = Delta_c - Delta_uw
  double g_eff = 0.0;        ///< (Omega g / 2)(1/Delta_c + 1/Delta_uw)
  double gamma = 0.0;        ///< g_eff^2 / delta
  double gamma_prime = 0.0;  ///< gamma - Omega^2 / Delta_uw
  double chi = 0.0;          ///< gamma_prime / gamma (0 and flagged when gamma = 0)
  bool chi_defined = false;
  // dispersive-validity flags (false = ratio below the 5x guard)
  bool dispersive_cavity_ok = false;  ///< Delta_c >= 5 g
  bool dispersive_drive_ok = false;   ///< Delta_uw >= 5 Omega
  bool dispersive_delta_ok = false;   ///< |delta| >= 5 g_eff

  /// Build directly from detunings (the natural entry point for ratio-based
  /// studies where no spectrum solve is involved).
  [[nodiscard]] static EffectiveParams from_detunings(double g, double omega_rabi,
                                                      double delta_c, double delta_uw);
};

/// EffectiveParams from a solved spectrum plus cavity/drive settings.
[[nodiscard]] EffectiveParams effective_params(const SpectrumResult& spectrum,
                                               const CavityParams& cavity,
                                               const DriveParams& drive);

/// Cavity coupling constant
///   g = (1/L) sqrt(omega_c / (2 mu_0 hbar)) <0|Phi|a> Integral(B_c . dS).
[[nodiscard]] double coupling_g(const SpectrumResult& spectrum,
                                const CouplingInputs& inputs,
                                const CavityParams& cavity,
                                const SquidParams& squid);

/// Drive Rabi frequency   Omega = (1 / 2 L hbar) <1|Phi|a> Integral(B_uw . dS).
[[nodiscard]] double rabi_omega(const SpectrumResult& spectrum,
                                const CouplingInputs& inputs,
                                const SquidParams& squid);

/// Microwave frequency for a second, non-identical SQUID that equalizes the
/// two-photon detunings: solves delta_2(omega_uw) = delta_target.
[[nodiscard]] double matched_drive_frequency(const SpectrumResult& spectrum_2,
                                             double omega_c, double delta_target);

/// Hamiltonian variants handled by the library.
enum class Variant {
  full_rotating,    ///< driven three-level SQUIDs + cavity, static rotating frame
  eff_single,       ///< one qubit + cavity after adiabatic elimination (static form)
  eff_two_photon,   ///< two qubits + cavity, photon-number-dependent Stark shifts
  eff_two_vacuum,   ///< two qubits, cavity virtually excited (4-dim)
};

[[nodiscard]] const char* variant_name(Variant v);

/// Composite-basis bookkeeping. Index layout: SQUID I is the most significant
/// digit, then SQUID II (then ancilla), then the photon number:
///   index = (sum_k level_k * levels^(n_squids-1-k)) * n_photon_states + n.
struct BasisDescriptor {
  int n_squids = 2;
  int levels = 2;        ///< per-SQUID level count (2 effective, 3 full)
  bool has_cavity = false;
  int n_max = 0;

  [[nodiscard]] int photon_states() const { return has_cavity ? n_max + 1 : 1; }
  [[nodiscard]] int dim() const {
    int d = photon_states();
    for (int k = 0; k < n_squids; ++k) d *= levels;
    return d;
  }
  [[nodiscard]] int index_of(const std::vector<int>& level_per_squid, int n_photon) const;
  [[nodiscard]] int level_of(int index, int squid) const;
  [[nodiscard]] int photons_of(int index) const;
};

/// An immutable composite model: Hamiltonian (stored as H/hbar, rad/s), basis
/// descriptor, frame bookkeeping and an operator factory. Frame conventions:
///  - `frame_rates` maps lab-frame states to this model's frame:
///      psi_model(t) = exp(+i * diag(frame_rates) * t) * psi_lab(t).
///  - `ip_rates` maps this model's frame to the interaction picture in which
///    the effective (adiabatically eliminated) Hamiltonians are written:
///      psi_ip(t) = exp(+i * diag(ip_rates) * t) * psi_model(t).
///    Protocol targets and single-qubit corrections are stated in that
///    picture, so full-model runs unwind with ip_rates before comparisons.
struct SystemModel {
  Variant variant = Variant::eff_two_vacuum;
  BasisDescriptor basis;
  Eigen::MatrixXcd hamiltonian;     ///< H/hbar (rad/s), Hermitian
  Eigen::VectorXd frame_rates;      ///< empty when no lab-frame mapping applies
  Eigen::VectorXd ip_rates;         ///< zero for models already in the interaction picture
  EffectiveParams eff;              ///< parameters the model was built from
  std::vector<std::string> warnings;///< non-fatal build notes (e.g. low Fock truncation)

  [[nodiscard]] int dim() const { return static_cast<int>(hamiltonian.rows()); }

  /// Embed a per-SQUID operator (levels x levels) on SQUID `squid`.
  [[nodiscard]] Eigen::MatrixXcd squid_op(int squid, const Eigen::MatrixXcd& op) const;
  /// |i><j| on SQUID `squid`, embedded.
  [[nodiscard]] Eigen::MatrixXcd sigma(int squid, int i, int j) const;
  /// Photon annihilation operator, embedded (identity when no cavity).
  [[nodiscard]] Eigen::MatrixXcd annihilation() const;
  [[nodiscard]] Eigen::MatrixXcd photon_number() const;
  /// Conserved excitation number appropriate to the variant (used by the
  /// invariant tests): c^dag c + sum_i (sigma_11,i + sigma_aa,i) for the full
  /// model, c^dag c + sum_i sigma_11,i with a cavity, sum_i sigma_11,i without.
  [[nodiscard]] Eigen::MatrixXcd excitation_number() const;

  void check_hermitian() const;  ///< throws NumericError if max|H - H^H| too large
};

/// Static rotating-frame Hamiltonian of the driven three-level SQUIDs coupled
/// to one cavity mode:
///   H/hbar = sum_i [ Delta_c sigma_aa,i + delta_i sigma_11,i
///                    + g (c^dag sigma_0a,i + h.c.) + Omega_i (sigma_a1,i + h.c.) ].
/// The frame applies per-SQUID level phases (0, omega_c - omega_uw, omega_c)
/// plus omega_c per photon, which removes all drive time dependence.
[[nodiscard]] SystemModel build_full_rotating(const SpectrumResult& spectrum,
                                              const CavityParams& cavity,
                                              const std::vector<DriveParams>& drives);

/// Same Hamiltonian expressed through detunings only (no spectrum needed);
/// one Omega and one delta per SQUID. No lab-frame mapping is recorded.
[[nodiscard]] SystemModel build_full_rotating_from_detunings(
    double g, double delta_c, const std::vector<double>& omega_rabi,
    const std::vector<double>& deltas, int n_max);

/// Effective models after adiabatic elimination of the intermediate level.
///  - eff_single: one qubit + cavity,
///      H/hbar = -(g^2/Delta_c) c^dag c sigma_00 + (delta - Omega^2/Delta_uw) sigma_11
///               - g_eff (c sigma_01^dag + c^dag sigma_01),
///    the static form of the single-SQUID Raman Hamiltonian (ip_rates = delta on |1>).
///  - eff_two_photon: two qubits + cavity with photon-number-dependent Stark
///    shifts and the cavity-mediated flip-flop coupling.
///  - eff_two_vacuum: the vacuum-sector reduction on two qubits,
///      H/hbar = gamma' (sigma_11,I + sigma_11,II) + gamma (flip-flop).
[[nodiscard]] SystemModel build_effective(Variant variant, const EffectiveParams& eff,
                                          int n_max = 5);

/// Vacuum-sector two-qubit coupling embedded on an `n_squids`-qubit register
/// acting only on the (sender, receiver) pair; the other qubits idle (their
/// drives are off, so they acquire neither Stark shift nor coupling).
[[nodiscard]] SystemModel build_pairwise_vacuum(const EffectiveParams& eff,
                                                int n_squids, int active_a,
                                                int active_b);

}  // namespace squidcav
