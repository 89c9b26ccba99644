#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "squidcav/model.hpp"

namespace squidcav {

/// A normalized pure state. Construction enforces unit norm to 1e-9; the
/// evolution routines never renormalize, so norm drift is a visible error
/// signal rather than something silently absorbed.
class StateVector {
 public:
  explicit StateVector(Eigen::VectorXcd amplitudes);

  [[nodiscard]] static StateVector basis_state(int dim, int index);

  [[nodiscard]] const Eigen::VectorXcd& vec() const { return v_; }
  [[nodiscard]] int dim() const { return static_cast<int>(v_.size()); }

 private:
  Eigen::VectorXcd v_;
};

/// A physical density matrix. Construction enforces trace 1 (1e-8),
/// Hermiticity (1e-10) and positivity (eigenvalues >= -1e-8).
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd rho);

  [[nodiscard]] static DensityMatrix pure(const StateVector& psi);

  [[nodiscard]] const Eigen::MatrixXcd& mat() const { return rho_; }
  [[nodiscard]] int dim() const { return static_cast<int>(rho_.rows()); }

 private:
  Eigen::MatrixXcd rho_;
};

/// What a collapse operator models (labels propagate into reports).
enum class ChannelKind { level_a_decay, cavity_decay, custom };

/// One Lindblad channel: dimensionless jump operator plus a rate in 1/s.
struct CollapseChannel {
  Eigen::MatrixXcd op;
  double rate = 0.0;
  ChannelKind kind = ChannelKind::custom;
};

/// |0><a| on one SQUID at rate 1/t1 (requires a three-level basis).
[[nodiscard]] CollapseChannel level_a_decay_channel(const SystemModel& model,
                                                    int squid, double t1);
/// Photon annihilation at rate kappa (requires a cavity).
[[nodiscard]] CollapseChannel cavity_decay_channel(const SystemModel& model,
                                                   double kappa);

/// Per-sample scalar observables. `pop_joint` is the joint qubit population
/// {P00, P01, P10, P11} marginalized over the cavity, restricted to both
/// SQUIDs being inside the {|0>, |1>} subspace (single-SQUID models fill the
/// first two slots). `pop_a_total` sums the intermediate-level population
/// over SQUIDs; `n_photon` is the mean photon number.
struct SampleObservables {
  std::array<double, 4> pop_joint{0.0, 0.0, 0.0, 0.0};
  double pop_a_total = 0.0;
  double n_photon = 0.0;
};

[[nodiscard]] SampleObservables observables_from_state(const BasisDescriptor& basis,
                                                       const Eigen::VectorXcd& psi);
[[nodiscard]] SampleObservables observables_from_density(const BasisDescriptor& basis,
                                                         const Eigen::MatrixXcd& rho);

/// Time-sampled evolution record. Unitary evolutions fill `states` (one
/// model-frame state per sample); the Lindblad propagator fills `densities`.
/// `observables` is always filled, one entry per sample.
struct Trajectory {
  std::vector<double> times;                    ///< seconds, uniform, t=0 first
  std::vector<Eigen::VectorXcd> states;
  std::vector<Eigen::MatrixXcd> densities;
  std::vector<SampleObservables> observables;
};

/// Evolve a pure state under the model's static Hamiltonian and record
/// `samples` uniform snapshots over [0, t_final]. One eigendecomposition is
/// done up front; each snapshot is two dense matrix-vector products and a
/// phase multiply, routed through the runtime-selected SIMD kernels.
[[nodiscard]] Trajectory evolve_static(const SystemModel& model,
                                       const StateVector& psi0, double t_final,
                                       int samples);

/// Reference oracle: integrate the time-dependent LAB-frame Schroedinger
/// equation (explicit exp(+/- i omega_uw t) drive phases, energies from the
/// solved spectrum with E_0 = 0) with an adaptive embedded Runge-Kutta 4(5)
/// pair. No rotating-wave step is taken and the state is never renormalized;
/// `tol` (in [1e-12, 1e-6]) sets the relative error target. Returned states
/// are lab-frame; map them with `rotating_from_lab` before comparing against
/// `evolve_static` of the matching rotating model.
[[nodiscard]] Trajectory evolve_lab_frame(const SpectrumResult& spectrum,
                                          const CavityParams& cavity,
                                          const std::vector<DriveParams>& drives,
                                          const StateVector& psi0, double t_final,
                                          double tol, int samples = 129);

/// Propagate a density matrix under H plus the given collapse channels by
/// exponentiating the Lindblad superoperator once per sample interval
/// (dense; dimension capped at 54). Trace and positivity are checked at
/// every sample and drift beyond 1e-6 aborts with a NumericError.
[[nodiscard]] Trajectory evolve_lindblad(const SystemModel& model,
                                         const std::vector<CollapseChannel>& channels,
                                         const DensityMatrix& rho0, double t_final,
                                         int samples);

/// Squared overlap |<a|b>|^2 when `up_to_global_phase` (the default).
/// With the flag unset the convention is the squared positive part of
/// Re <a|b>: any relative phase between the states reduces the result, and
/// an overlap pointing away from the target counts as zero.
[[nodiscard]] double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                              bool up_to_global_phase = true);

/// <psi| rho |psi> (real part).
[[nodiscard]] double fidelity_state_rho(const Eigen::VectorXcd& psi,
                                        const Eigen::MatrixXcd& rho);

enum class Population { level_a, cavity_photons };

/// Maximum over the trajectory samples of the summed intermediate-level
/// population or of the mean photon number.
[[nodiscard]] double peak_populations(const Trajectory& traj, Population which);

/// psi_ip(t) = exp(+i diag(ip_rates) t) psi_model(t): undo the static
/// diagonal the effective (interaction-picture) Hamiltonians rotate at.
[[nodiscard]] Eigen::VectorXcd to_interaction_picture(const SystemModel& model,
                                                      const Eigen::VectorXcd& psi,
                                                      double t);

/// psi_model(t) = exp(+i diag(frame_rates) t) psi_lab(t): map a lab-frame
/// state into the model's rotating frame (requires a model built from a
/// spectrum, which records the frame).
[[nodiscard]] Eigen::VectorXcd rotating_from_lab(const SystemModel& model,
                                                 const Eigen::VectorXcd& psi,
                                                 double t);

}  // namespace squidcav
