#include "squidcav/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "squidcav/kernels.hpp"

namespace squidcav {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_samples(int samples) {
  if (samples < 2) throw ConfigError("at least 2 trajectory samples are required");
}

void require_time(double t_final) {
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw ConfigError("evolution time must be finite and >= 0");
  }
}

std::vector<double> sample_times(double t_final, int samples) {
  std::vector<double> times(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    times[static_cast<std::size_t>(k)] =
        t_final * static_cast<double>(k) / static_cast<double>(samples - 1);
  }
  return times;
}

Eigen::VectorXcd phase_rotate(const Eigen::VectorXd& rates, double t,
                              const Eigen::VectorXcd& psi) {
  Eigen::VectorXcd out(psi.size());
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    out(k) = std::exp(kI * (rates(k) * t)) * psi(k);
  }
  return out;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

StateVector::StateVector(Eigen::VectorXcd amplitudes) : v_(std::move(amplitudes)) {
  if (v_.size() == 0) throw ConfigError("state vector must be non-empty");
  const double norm = v_.norm();
  if (std::abs(norm - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "state vector must be normalized: |norm - 1| = " << std::abs(norm - 1.0);
    throw ConfigError(msg.str());
  }
}

StateVector StateVector::basis_state(int dim, int index) {
  if (dim < 1 || index < 0 || index >= dim) {
    throw ConfigError("basis state index out of range");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw ConfigError("density matrix must be square and non-empty");
  }
  const double trace_dev = std::abs(rho_.trace() - cplx(1.0, 0.0));
  if (trace_dev > 1e-8) {
    std::ostringstream msg;
    msg << "density matrix must have unit trace: |tr - 1| = " << trace_dev;
    throw ConfigError(msg.str());
  }
  const double herm_dev = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > 1e-10) {
    std::ostringstream msg;
    msg << "density matrix must be Hermitian: max|rho - rho^H| = " << herm_dev;
    throw ConfigError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_,
                                                     Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-8) {
    std::ostringstream msg;
    msg << "density matrix must be positive semidefinite: min eigenvalue = "
        << min_eig;
    throw ConfigError(msg.str());
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.vec() * psi.vec().adjoint());
}

CollapseChannel level_a_decay_channel(const SystemModel& model, int squid,
                                      double t1) {
  if (model.basis.levels < 3) {
    throw ConfigError("intermediate-level decay needs a three-level basis");
  }
  if (!(t1 > 0.0)) throw ConfigError("decay time t1 must be > 0");
  return CollapseChannel{model.sigma(squid, 0, 2), 1.0 / t1,
                         ChannelKind::level_a_decay};
}

CollapseChannel cavity_decay_channel(const SystemModel& model, double kappa) {
  if (!model.basis.has_cavity) {
    throw ConfigError("cavity decay needs a model with a cavity mode");
  }
  if (!(kappa >= 0.0)) throw ConfigError("cavity decay rate must be >= 0");
  return CollapseChannel{model.annihilation(), kappa, ChannelKind::cavity_decay};
}

namespace {

SampleObservables observables_from_probabilities(const BasisDescriptor& basis,
                                                 const std::vector<double>& prob) {
  SampleObservables obs;
  const int d = basis.dim();
  for (int idx = 0; idx < d; ++idx) {
    const double p = prob[static_cast<std::size_t>(idx)];
    obs.n_photon += p * basis.photons_of(idx);
    bool in_qubit_space = true;
    for (int k = 0; k < basis.n_squids; ++k) {
      const int lv = basis.level_of(idx, k);
      if (lv >= 2) {
        obs.pop_a_total += p;
        in_qubit_space = false;
      }
    }
    if (!in_qubit_space) continue;
    const int l0 = basis.level_of(idx, 0);
    if (basis.n_squids == 1) {
      obs.pop_joint[static_cast<std::size_t>(l0)] += p;
    } else {
      const int l1 = basis.level_of(idx, 1);
      obs.pop_joint[static_cast<std::size_t>(2 * l0 + l1)] += p;
    }
  }
  return obs;
}

}  // namespace

SampleObservables observables_from_state(const BasisDescriptor& basis,
                                         const Eigen::VectorXcd& psi) {
  const int d = basis.dim();
  if (psi.size() != d) throw ConfigError("state dimension does not match basis");
  std::vector<double> prob(static_cast<std::size_t>(d));
  for (int idx = 0; idx < d; ++idx) prob[static_cast<std::size_t>(idx)] = std::norm(psi(idx));
  return observables_from_probabilities(basis, prob);
}

SampleObservables observables_from_density(const BasisDescriptor& basis,
                                           const Eigen::MatrixXcd& rho) {
  const int d = basis.dim();
  if (rho.rows() != d || rho.cols() != d) {
    throw ConfigError("density-matrix dimension does not match basis");
  }
  std::vector<double> prob(static_cast<std::size_t>(d));
  for (int idx = 0; idx < d; ++idx) prob[static_cast<std::size_t>(idx)] = rho(idx, idx).real();
  return observables_from_probabilities(basis, prob);
}

Trajectory evolve_static(const SystemModel& model, const StateVector& psi0,
                         double t_final, int samples) {
  require_samples(samples);
  require_time(t_final);
  const int d = model.dim();
  if (psi0.dim() != d) throw ConfigError("initial state dimension does not match model");
  model.check_hermitian();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(model.hamiltonian);
  if (es.info() != Eigen::Success) {
    throw NumericError("Hamiltonian eigendecomposition failed");
  }
  const Eigen::MatrixXcd evecs = es.eigenvectors();
  const Eigen::VectorXd evals = es.eigenvalues();

  const kernels::KernelTable& kt = kernels::active();
  const auto n = static_cast<std::size_t>(d);

  // coefficients in the eigenbasis: c0 = V^H psi0
  Eigen::VectorXcd c0(d);
  kt.zgemv_c(n, n, evecs.data(), psi0.vec().data(), c0.data());

  Trajectory traj;
  traj.times = sample_times(t_final, samples);
  traj.states.reserve(static_cast<std::size_t>(samples));
  traj.observables.reserve(static_cast<std::size_t>(samples));

  Eigen::VectorXcd phases(d), ck(d), psi(d);
  for (double t : traj.times) {
    for (int j = 0; j < d; ++j) phases(j) = std::exp(-kI * (evals(j) * t));
    kt.zvmul(n, phases.data(), c0.data(), ck.data());
    kt.zgemv_n(n, n, evecs.data(), ck.data(), psi.data(), false);
    traj.states.push_back(psi);
    traj.observables.push_back(observables_from_state(model.basis, psi));
  }
  return traj;
}

namespace {

/// Classic Dormand-Prince 4(5) embedded pair with FSAL, on dy/dt = f(t, y).
/// Error control is per-component relative+absolute; the state is never
/// renormalized so the integration error is fully visible to callers.
class DormandPrince {
 public:
  using Rhs = std::function<void(double, const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

  DormandPrince(Rhs rhs, double rtol, double atol)
      : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {}

  /// Advance y from t to t_end, adapting the step; `h` persists across calls.
  void integrate_to(double& t, Eigen::VectorXcd& y, double t_end, double& h,
                    Eigen::VectorXcd& k1, bool& k1_valid) {
    const int d = static_cast<int>(y.size());
    Eigen::VectorXcd k2(d), k3(d), k4(d), k5(d), k6(d), k7(d);
    Eigen::VectorXcd ytmp(d), ynew(d), yerr(d);
    long steps = 0;
    const double t_span = std::abs(t_end - t);
    if (t_span == 0.0) return;

    while (t < t_end) {
      if (++steps > kMaxSteps) {
        throw NumericError("lab-frame integrator exceeded the step budget; "
                           "the problem appears stiff at this tolerance");
      }
      if (h < t_span * 1e-14) {
        throw NumericError("lab-frame integrator step size underflow; "
                           "the problem appears stiff at this tolerance");
      }
      bool clipped = false;
      double hs = h;
      if (t + hs >= t_end) {
        hs = t_end - t;
        clipped = true;
      }

      if (!k1_valid) {
        rhs_(t, y, k1);
        k1_valid = true;
      }
      ytmp = y + hs * (kA21 * k1);
      rhs_(t + kC2 * hs, ytmp, k2);
      ytmp = y + hs * (kA31 * k1 + kA32 * k2);
      rhs_(t + kC3 * hs, ytmp, k3);
      ytmp = y + hs * (kA41 * k1 + kA42 * k2 + kA43 * k3);
      rhs_(t + kC4 * hs, ytmp, k4);
      ytmp = y + hs * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
      rhs_(t + kC5 * hs, ytmp, k5);
      ytmp = y + hs * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
      rhs_(t + hs, ytmp, k6);
      ynew = y + hs * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
      rhs_(t + hs, ynew, k7);
      yerr = hs * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

      double err_sq = 0.0;
      for (int i = 0; i < d; ++i) {
        const double scale =
            atol_ + rtol_ * std::max(std::abs(y(i)), std::abs(ynew(i)));
        const double e = std::abs(yerr(i)) / scale;
        err_sq += e * e;
      }
      const double err = std::sqrt(err_sq / d);

      if (err <= 1.0) {
        t = clipped ? t_end : t + hs;
        y.swap(ynew);
        k1 = k7;  // first-same-as-last
        const double grow =
            err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = hs * grow;
      } else {
        h = hs * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        k1_valid = true;  // k1 still matches (t, y)
      }
    }
  }

 private:
  static constexpr long kMaxSteps = 50'000'000;
  static constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0,
                          kC5 = 8.0 / 9.0;
  static constexpr double kA21 = 1.0 / 5.0;
  static constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
  static constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
  static constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                          kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
  static constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                          kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                          kA65 = -5103.0 / 18656.0;
  static constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0,
                          kB4 = 125.0 / 192.0, kB5 = -2187.0 / 6784.0,
                          kB6 = 11.0 / 84.0;
  // 5th-order minus embedded 4th-order weights
  static constexpr double kE1 = 35.0 / 384.0 - 5179.0 / 57600.0;
  static constexpr double kE3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
  static constexpr double kE4 = 125.0 / 192.0 - 393.0 / 640.0;
  static constexpr double kE5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
  static constexpr double kE6 = 11.0 / 84.0 - 187.0 / 2100.0;
  static constexpr double kE7 = -1.0 / 40.0;

  Rhs rhs_;
  double rtol_;
  double atol_;
};

}  // namespace

Trajectory evolve_lab_frame(const SpectrumResult& spectrum,
                            const CavityParams& cavity,
                            const std::vector<DriveParams>& drives,
                            const StateVector& psi0, double t_final, double tol,
                            int samples) {
  require_samples(samples);
  require_time(t_final);
  cavity.validate();
  if (drives.empty() || drives.size() > 3) {
    throw ConfigError("lab-frame oracle supports 1 to 3 driven SQUIDs");
  }
  for (const DriveParams& drv : drives) drv.validate();
  if (!(tol >= 1e-12 && tol <= 1e-6)) {
    throw ConfigError("lab-frame tolerance must lie in [1e-12, 1e-6]");
  }

  SystemModel scratch;  // operator factory only
  scratch.basis = BasisDescriptor{static_cast<int>(drives.size()), 3, true,
                                  cavity.n_max};
  const int d = scratch.basis.dim();
  scratch.hamiltonian = Eigen::MatrixXcd::Zero(d, d);
  if (psi0.dim() != d) throw ConfigError("initial state dimension does not match model");

  // static part, energies referenced to E_0 = 0
  Eigen::MatrixXcd h_static = Eigen::MatrixXcd::Zero(d, d);
  const Eigen::MatrixXcd adag = scratch.annihilation().adjoint();
  h_static += cavity.omega_c * Eigen::MatrixXcd(adag * scratch.annihilation());
  std::vector<Eigen::MatrixXcd> drive_ops, drive_ops_dag;  // |1><a|, |a><1|
  for (int i = 0; i < scratch.basis.n_squids; ++i) {
    h_static += spectrum.omega_10 * scratch.sigma(i, 1, 1) +
                spectrum.omega_a0 * scratch.sigma(i, 2, 2);
    const Eigen::MatrixXcd exchange = adag * scratch.sigma(i, 0, 2);
    h_static += cavity.g * (exchange + exchange.adjoint());
    drive_ops.push_back(scratch.sigma(i, 1, 2));
    drive_ops_dag.push_back(drive_ops.back().adjoint());
  }

  const auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    dy.noalias() = h_static * y;
    for (std::size_t i = 0; i < drives.size(); ++i) {
      const cplx phase = std::exp(kI * (drives[i].omega_uw * t));
      dy.noalias() += (drives[i].omega_rabi * phase) * (drive_ops[i] * y);
      dy.noalias() +=
          (drives[i].omega_rabi * std::conj(phase)) * (drive_ops_dag[i] * y);
    }
    dy *= -kI;
  };

  DormandPrince stepper(rhs, tol, tol * 1e-2);

  Trajectory traj;
  traj.times = sample_times(t_final, samples);
  traj.states.reserve(static_cast<std::size_t>(samples));
  traj.observables.reserve(static_cast<std::size_t>(samples));

  Eigen::VectorXcd y = psi0.vec();
  Eigen::VectorXcd k1(d);
  bool k1_valid = false;
  double t = 0.0;
  // initial step: conservative fraction of the fastest oscillation period
  double h_scale = cavity.omega_c + spectrum.omega_a0;
  for (const DriveParams& drv : drives) h_scale = std::max(h_scale, drv.omega_uw);
  double h = std::min(t_final, 0.05 * 2.0 * constants::pi / h_scale);

  for (double t_sample : traj.times) {
    if (t_sample > t) stepper.integrate_to(t, y, t_sample, h, k1, k1_valid);
    traj.states.push_back(y);
    traj.observables.push_back(observables_from_state(scratch.basis, y));
  }
  return traj;
}

Trajectory evolve_lindblad(const SystemModel& model,
                           const std::vector<CollapseChannel>& channels,
                           const DensityMatrix& rho0, double t_final, int samples) {
  require_samples(samples);
  require_time(t_final);
  const int d = model.dim();
  if (rho0.dim() != d) throw ConfigError("density-matrix dimension does not match model");
  if (d > 54) {
    throw ConfigError("density-matrix propagation uses a dense superoperator; "
                      "dimension > 54 is not supported");
  }
  model.check_hermitian();

  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd& h = model.hamiltonian;

  // column-major vectorization: vec(A rho B) = (B^T kron A) vec(rho)
  Eigen::MatrixXcd lind = -kI * (kron(id, h) - kron(h.transpose(), id));
  for (const CollapseChannel& ch : channels) {
    if (ch.op.rows() != d || ch.op.cols() != d) {
      throw ConfigError("collapse operator dimension does not match model");
    }
    if (!(ch.rate >= 0.0)) throw ConfigError("collapse rate must be >= 0");
    if (ch.rate == 0.0) continue;
    const Eigen::MatrixXcd ldl = ch.op.adjoint() * ch.op;
    lind += ch.rate * (kron(ch.op.conjugate(), ch.op) - 0.5 * kron(id, ldl) -
                       0.5 * kron(ldl.transpose(), id));
  }

  const double dt = t_final / static_cast<double>(samples - 1);
  const Eigen::MatrixXcd propagator = (lind * dt).exp();

  Trajectory traj;
  traj.times = sample_times(t_final, samples);
  traj.densities.reserve(static_cast<std::size_t>(samples));
  traj.observables.reserve(static_cast<std::size_t>(samples));

  Eigen::VectorXcd vec_rho =
      Eigen::Map<const Eigen::VectorXcd>(rho0.mat().data(), d * d);
  for (int k = 0; k < samples; ++k) {
    if (k > 0) vec_rho = propagator * vec_rho;
    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(vec_rho.data(), d, d);

    const double trace_dev = std::abs(rho.trace() - cplx(1.0, 0.0));
    if (trace_dev > 1e-6) {
      std::ostringstream msg;
      msg << "Lindblad propagation lost trace normalization at t = "
          << traj.times[static_cast<std::size_t>(k)] << ": |tr - 1| = " << trace_dev;
      throw NumericError(msg.str());
    }
    const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-6) {
      std::ostringstream msg;
      msg << "Lindblad propagation lost positivity at t = "
          << traj.times[static_cast<std::size_t>(k)] << ": min eigenvalue = " << min_eig;
      throw NumericError(msg.str());
    }

    traj.observables.push_back(observables_from_density(model.basis, rho));
    traj.densities.push_back(std::move(rho));
  }
  return traj;
}

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                bool up_to_global_phase) {
  if (a.size() != b.size()) throw ConfigError("fidelity of mismatched dimensions");
  const cplx overlap = a.dot(b);  // conjugates the first argument
  if (up_to_global_phase) return std::norm(overlap);
  const double aligned = std::max(0.0, overlap.real());
  return aligned * aligned;
}

double fidelity_state_rho(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& rho) {
  if (rho.rows() != psi.size() || rho.cols() != psi.size()) {
    throw ConfigError("fidelity of mismatched dimensions");
  }
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

double peak_populations(const Trajectory& traj, Population which) {
  if (traj.observables.size() < 2) {
    throw ConfigError("peak populations need a trajectory with at least 2 samples");
  }
  double peak = 0.0;
  for (const SampleObservables& obs : traj.observables) {
    peak = std::max(peak,
                    which == Population::level_a ? obs.pop_a_total : obs.n_photon);
  }
  return peak;
}

Eigen::VectorXcd to_interaction_picture(const SystemModel& model,
                                        const Eigen::VectorXcd& psi, double t) {
  if (model.ip_rates.size() != psi.size()) {
    throw ConfigError("model carries no interaction-picture record for this dimension");
  }
  return phase_rotate(model.ip_rates, t, psi);
}

Eigen::VectorXcd rotating_from_lab(const SystemModel& model,
                                   const Eigen::VectorXcd& psi, double t) {
  if (model.frame_rates.size() != psi.size()) {
    throw ConfigError("model carries no lab-frame record; build it from a spectrum");
  }
  return phase_rotate(model.frame_rates, t, psi);
}

}  // namespace squidcav
