#pragma once

#include <array>
#include <string>
#include <vector>

#include "squidcav/dynamics.hpp"

namespace squidcav {

/// Gate vocabulary of the CNOT sequence (all matrices in the |0>-first basis;
/// see `gate` for the transcription convention).
enum class GateLabel {
  H,          ///< Hadamard variant, 2x2
  H_inv,      ///< its inverse
  Hbar,       ///< conjugate Hadamard variant
  Hbar_inv,   ///< its inverse
  S,          ///< phase shift diag(e^{-i chi pi/8}, e^{+i chi pi/8})
  sigma_y,    ///< standard Pauli-Y
  U_I_II,     ///< 4x4 joint two-qubit evolution for a given gamma*t
  CNOT_ideal, ///< 4x4 ideal controlled-NOT (control = qubit I)
};

[[nodiscard]] const char* gate_name(GateLabel label);

/// Gate matrix for `label`. The source matrices are stated in the reversed
/// column convention |0> = (0,1)^T; they are conjugated by the basis-swap
/// matrix at transcription so that internally |0> = (1,0)^T everywhere. `chi` feeds the
/// S gate and the joint evolution; `gamma_t` is used only by U_I_II. Every
/// returned matrix is checked unitary to 1e-12.
[[nodiscard]] Eigen::MatrixXcd gate(GateLabel label, double chi,
                                    double gamma_t = constants::pi / 4.0);

/// Outcome of one protocol run. State-valued protocols fill the *_state
/// fields; operator-valued ones (CNOT, SWAP) fill the *_unitary fields.
/// `fidelity` is global-phase-insensitive; `distance` is the phase-aligned
/// residual min_phi || achieved - e^{i phi} target ||.
struct ProtocolReport {
  std::string protocol;
  Variant variant = Variant::eff_two_vacuum;

  Eigen::VectorXcd target_state;
  Eigen::VectorXcd achieved_state;
  Eigen::VectorXcd intermediate_state;  ///< transfer: state after Step (i)

  Eigen::MatrixXcd target_unitary;
  Eigen::MatrixXcd achieved_unitary;

  double fidelity = 0.0;
  double distance = 0.0;
  double phase_removed_residual = 0.0;  ///< || e^{+i phase} achieved - target ||
                                        ///< with the protocol's stated common
                                        ///< phase removed (state protocols)

  double gamma_t = 0.0;        ///< dimensionless interaction time(s) used
  double gamma_prime_t = 0.0;
  double chi = 0.0;
  double t_total = 0.0;        ///< physical protocol duration (s)

  double peak_pop_a = 0.0;     ///< full-model runs; 0 for two-level models
  double peak_n_photon = 0.0;

  Trajectory trajectory;                  ///< sampled evolution (state protocols)
  std::vector<double> fidelity_vs_target; ///< per trajectory sample
};

/// Phase-aligned distances used by all verifications:
/// min over a global phase of the Frobenius (vector) norm difference.
[[nodiscard]] double phase_aligned_distance(const Eigen::MatrixXcd& achieved,
                                            const Eigen::MatrixXcd& target);
[[nodiscard]] double phase_aligned_distance(const Eigen::VectorXcd& achieved,
                                            const Eigen::VectorXcd& target);

/// Two-qubit concurrence of a pure state (amplitude order |00>,|01>,|10>,|11>):
/// C = 2 |a00 a11 - a01 a10|.
[[nodiscard]] double concurrence(const Eigen::VectorXcd& two_qubit_state);

/// Evolve |0>_I |1>_II (cavity vacuum) for t = pi/(4 gamma) and compare with
/// (|01> - i|10>)/sqrt(2); the run's common phase e^{-i chi pi/4} is removed
/// for the residual and ignored by the fidelity. Works on any two-SQUID
/// model variant; full-model states are unwound to the interaction picture
/// before comparison.
[[nodiscard]] ProtocolReport generate_bell(const SystemModel& model,
                                           const EffectiveParams& eff,
                                           int samples = 257);

/// Two-step transfer of alpha|0> + beta|1> from SQUID I to SQUID II:
/// Step (i) evolves for t = pi/(2 gamma); Step (ii) applies the phase gate
/// diag(e^{-i(1+chi)pi/4}, e^{+i(1+chi)pi/4}) on qubit II. The target is
/// e^{-i(1+chi)pi/4} |0>_I (alpha|0> + beta|1>)_II.
[[nodiscard]] ProtocolReport transfer_state(const SystemModel& model,
                                            const EffectiveParams& eff,
                                            cplx alpha, cplx beta,
                                            int samples = 257);

/// Compose the resolved gate sequence into a 4x4 operator and verify it
/// against the ideal CNOT (phase-aligned distance below `tol`); throws a
/// VerificationError carrying the achieved matrix and per-column overlaps
/// when the check fails.
[[nodiscard]] ProtocolReport cnot_unitary(const EffectiveParams& eff,
                                          double tol = 1e-10);

/// The same sequence with the two joint evolutions run on the full
/// three-level + cavity model (single-qubit gates stay ideal/instantaneous,
/// applied in the interaction picture).
[[nodiscard]] ProtocolReport cnot_full(const EffectiveParams& eff, int n_max = 5,
                                       int samples = 257);

/// The sequence reading used by cnot_unitary, as composition tokens ordered
/// left to right (leftmost factor first; the rightmost acts on states first).
[[nodiscard]] std::vector<std::string> cnot_default_reading();

/// Compose an explicit token reading (same vocabulary as
/// cnot_default_reading) into its 4x4 operator.
[[nodiscard]] Eigen::MatrixXcd compose_reading(const std::vector<std::string>& tokens,
                                               double chi);

/// Enumerate the bounded family of readings of the CNOT gate sequence
/// (a Hadamard-variant choice in each of the eight ambiguous slots) and
/// return those whose composition reaches the ideal CNOT within `tol`.
[[nodiscard]] std::vector<std::vector<std::string>> resolve_cnot_readings(
    const EffectiveParams& eff, double tol = 1e-10, bool first_only = false);

/// Three pairwise transfers (I -> ancilla, II -> I, ancilla -> II), each the
/// two-step transfer above run on the active pair only, composed into the
/// register operator. Verifies |i>|j>|0> -> |j>|i>|0> up to one COMMON
/// global phase; the report's achieved_unitary is the 4x4 logical block.
[[nodiscard]] ProtocolReport swap_via_ancilla(const SystemModel& model_3q,
                                              const EffectiveParams& eff,
                                              int samples = 257);

/// The same three-stage SWAP on the full three-SQUID + cavity model, the
/// idle SQUID's drive switched off in each stage.
[[nodiscard]] ProtocolReport swap_full(const EffectiveParams& eff, int n_max = 5,
                                       int samples = 129);

/// Gate error from discarding the Stark-shift phases: the closed form
///   P_e = 4 sin^2(theta/2) [p0(1-p0) + p3(1-p3) + 2 cos(theta) p0 p3],
/// theta = gamma'*t, p_i = |alpha_i|^2, next to the matrix-exponential
/// oracle 1 - |<psi| U^-1 U' |psi>|^2 where U evolves under the two-qubit
/// vacuum Hamiltonian and U' under its flip-flop part alone.
struct StarkErrorResult {
  double pe_closed_form = 0.0;
  double pe_oracle = 0.0;
};

[[nodiscard]] StarkErrorResult stark_error(const std::array<cplx, 4>& amplitudes,
                                           double theta, double chi);

}  // namespace squidcav
