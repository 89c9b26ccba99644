#include "squidcav/model.hpp"

#include <cmath>
#include <sstream>

namespace squidcav {

namespace {

using constants::hbar;
using constants::mu_0;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Eigen::MatrixXcd annihilation_matrix(int n_states) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_states, n_states);
  for (int n = 1; n < n_states; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXcd level_op(int levels, int i, int j) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(levels, levels);
  m(i, j) = 1.0;
  return m;
}

/// Embed `op` acting on SQUID `squid` of an (n_squids, levels, cavity) basis.
Eigen::MatrixXcd embed(const BasisDescriptor& basis, int squid,
                       const Eigen::MatrixXcd& op) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int k = 0; k < basis.n_squids; ++k) {
    out = kron(out, k == squid
                        ? op
                        : Eigen::MatrixXcd::Identity(basis.levels, basis.levels));
  }
  const int nc = basis.photon_states();
  return kron(out, Eigen::MatrixXcd::Identity(nc, nc));
}

Eigen::MatrixXcd embed_cavity(const BasisDescriptor& basis,
                              const Eigen::MatrixXcd& op) {
  int squid_dim = 1;
  for (int k = 0; k < basis.n_squids; ++k) squid_dim *= basis.levels;
  return kron(Eigen::MatrixXcd::Identity(squid_dim, squid_dim), op);
}

}  // namespace

void CavityParams::validate() const {
  if (!(omega_c > 0.0)) throw ConfigError("cavity frequency must be > 0");
  if (g < 0.0) throw ConfigError("cavity coupling g must be >= 0");
  if (n_max < 1) throw ConfigError("cavity.n_max must be >= 1");
  if (quality && !(*quality > 0.0)) throw ConfigError("cavity.Q must be > 0");
}

void DriveParams::validate() const {
  if (omega_rabi < 0.0) throw ConfigError("drive Rabi frequency must be >= 0");
  if (!(omega_uw > 0.0)) throw ConfigError("drive frequency must be > 0");
}

EffectiveParams EffectiveParams::from_detunings(double g, double omega_rabi,
                                                double delta_c, double delta_uw) {
  if (!(delta_c > 0.0) || !(delta_uw > 0.0)) {
    throw ConfigError("adiabatic elimination requires Delta_c > 0 and Delta_uw > 0");
  }
  EffectiveParams p;
  p.g = g;
  p.omega_rabi = omega_rabi;
  p.delta_c = delta_c;
  p.delta_uw = delta_uw;
  p.delta = delta_c - delta_uw;
  if (p.delta == 0.0) {
    throw ConfigError("degenerate detunings: delta = Delta_c - Delta_uw must be nonzero");
  }
  p.g_eff = 0.5 * omega_rabi * g * (1.0 / delta_c + 1.0 / delta_uw);
  p.gamma = p.g_eff * p.g_eff / p.delta;
  p.gamma_prime = p.gamma - omega_rabi * omega_rabi / delta_uw;
  p.chi_defined = p.gamma != 0.0;
  p.chi = p.chi_defined ? p.gamma_prime / p.gamma : 0.0;
  p.dispersive_cavity_ok = delta_c >= 5.0 * g;
  p.dispersive_drive_ok = delta_uw >= 5.0 * omega_rabi;
  p.dispersive_delta_ok = std::abs(p.delta) >= 5.0 * std::abs(p.g_eff);
  return p;
}

EffectiveParams effective_params(const SpectrumResult& spectrum,
                                 const CavityParams& cavity,
                                 const DriveParams& drive) {
  return EffectiveParams::from_detunings(cavity.g, drive.omega_rabi,
                                         spectrum.omega_a0 - cavity.omega_c,
                                         spectrum.omega_a1 - drive.omega_uw);
}

double coupling_g(const SpectrumResult& spectrum, const CouplingInputs& inputs,
                  const CavityParams& cavity, const SquidParams& squid) {
  const double me_0a = spectrum.flux_me(0, 2);
  return (1.0 / squid.inductance) * std::sqrt(cavity.omega_c / (2.0 * mu_0 * hbar)) *
         me_0a * inputs.bc_integral;
}

double rabi_omega(const SpectrumResult& spectrum, const CouplingInputs& inputs,
                  const SquidParams& squid) {
  const double me_1a = spectrum.flux_me(1, 2);
  return (1.0 / (2.0 * squid.inductance * hbar)) * me_1a * inputs.buw_integral;
}

double matched_drive_frequency(const SpectrumResult& spectrum_2, double omega_c,
                               double delta_target) {
  // delta = omega_a0 - omega_a1 - omega_c + omega_uw, solved for omega_uw.
  return delta_target - spectrum_2.omega_a0 + spectrum_2.omega_a1 + omega_c;
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::full_rotating: return "full_rotating";
    case Variant::eff_single: return "eff_single";
    case Variant::eff_two_photon: return "eff_two_photon";
    case Variant::eff_two_vacuum: return "eff_two_vacuum";
  }
  return "unknown";
}

int BasisDescriptor::index_of(const std::vector<int>& level_per_squid,
                              int n_photon) const {
  int idx = 0;
  for (int k = 0; k < n_squids; ++k) idx = idx * levels + level_per_squid.at(k);
  return idx * photon_states() + n_photon;
}

int BasisDescriptor::level_of(int index, int squid) const {
  int rest = index / photon_states();
  for (int k = n_squids - 1; k > squid; --k) rest /= levels;
  return rest % levels;
}

int BasisDescriptor::photons_of(int index) const {
  return index % photon_states();
}

Eigen::MatrixXcd SystemModel::squid_op(int squid, const Eigen::MatrixXcd& op) const {
  return embed(basis, squid, op);
}

Eigen::MatrixXcd SystemModel::sigma(int squid, int i, int j) const {
  return embed(basis, squid, level_op(basis.levels, i, j));
}

Eigen::MatrixXcd SystemModel::annihilation() const {
  return embed_cavity(basis, annihilation_matrix(basis.photon_states()));
}

Eigen::MatrixXcd SystemModel::photon_number() const {
  const Eigen::MatrixXcd a = annihilation_matrix(basis.photon_states());
  return embed_cavity(basis, Eigen::MatrixXcd(a.adjoint() * a));
}

Eigen::MatrixXcd SystemModel::excitation_number() const {
  Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(dim(), dim());
  if (basis.has_cavity) n += photon_number();
  for (int k = 0; k < basis.n_squids; ++k) {
    n += sigma(k, 1, 1);
    if (basis.levels >= 3) n += sigma(k, 2, 2);
  }
  return n;
}

void SystemModel::check_hermitian() const {
  const double scale = hamiltonian.cwiseAbs().maxCoeff();
  const double dev = (hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && dev > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "Hamiltonian not Hermitian: max deviation " << dev << " vs scale " << scale;
    throw NumericError(msg.str());
  }
}

SystemModel build_full_rotating_from_detunings(double g, double delta_c,
                                               const std::vector<double>& omega_rabi,
                                               const std::vector<double>& deltas,
                                               int n_max) {
  const int n_squids = static_cast<int>(omega_rabi.size());
  if (n_squids < 1 || n_squids > 3) {
    throw ConfigError("full model supports 1 to 3 SQUIDs");
  }
  if (deltas.size() != omega_rabi.size()) {
    throw ConfigError("one delta per SQUID drive is required");
  }

  SystemModel m;
  m.variant = Variant::full_rotating;
  m.basis = BasisDescriptor{n_squids, 3, true, n_max};
  if (n_max < 3) {
    m.warnings.push_back("Fock truncation n_max < 3; virtual-photon amplitudes "
                         "may be clipped");
  }
  const int d = m.basis.dim();
  m.hamiltonian = Eigen::MatrixXcd::Zero(d, d);

  const Eigen::MatrixXcd adag = m.annihilation().adjoint();
  for (int i = 0; i < n_squids; ++i) {
    m.hamiltonian += delta_c * m.sigma(i, 2, 2) + deltas[i] * m.sigma(i, 1, 1);
    const Eigen::MatrixXcd exchange = adag * m.sigma(i, 0, 2);  // c^dag |0><a|
    m.hamiltonian += g * (exchange + exchange.adjoint());
    const Eigen::MatrixXcd drive = m.sigma(i, 2, 1);            // |a><1|
    m.hamiltonian += omega_rabi[i] * (drive + drive.adjoint());
  }

  // Interaction-picture unwinding: the static diagonal (delta per |1>,
  // Delta_c per |a>) is what the effective-frame Hamiltonians rotate away.
  m.ip_rates = Eigen::VectorXd::Zero(d);
  for (int idx = 0; idx < d; ++idx) {
    double rate = 0.0;
    for (int k = 0; k < n_squids; ++k) {
      const int lv = m.basis.level_of(idx, k);
      if (lv == 1) rate += deltas[k];
      if (lv == 2) rate += delta_c;
    }
    m.ip_rates(idx) = rate;
  }

  m.check_hermitian();
  return m;
}

SystemModel build_full_rotating(const SpectrumResult& spectrum,
                                const CavityParams& cavity,
                                const std::vector<DriveParams>& drives) {
  cavity.validate();
  const double delta_c = spectrum.omega_a0 - cavity.omega_c;
  std::vector<double> omegas, deltas;
  for (const DriveParams& drv : drives) {
    drv.validate();
    omegas.push_back(drv.omega_rabi);
    deltas.push_back(spectrum.omega_10 - cavity.omega_c + drv.omega_uw);
  }
  SystemModel m = build_full_rotating_from_detunings(cavity.g, delta_c, omegas,
                                                     deltas, cavity.n_max);
  const double delta_uw = spectrum.omega_a1 - drives.front().omega_uw;
  if (delta_c > 0.0 && delta_uw > 0.0 && delta_c != delta_uw) {
    m.eff = EffectiveParams::from_detunings(cavity.g, drives.front().omega_rabi,
                                            delta_c, delta_uw);
  }

  // Rotating-frame record: psi_model = exp(+i R t) psi_lab with per-SQUID
  // level phases (0, omega_c - omega_uw,i, omega_c) plus omega_c per photon.
  const int d = m.basis.dim();
  m.frame_rates = Eigen::VectorXd::Zero(d);
  for (int idx = 0; idx < d; ++idx) {
    double rate = cavity.omega_c * m.basis.photons_of(idx);
    for (int k = 0; k < m.basis.n_squids; ++k) {
      const int lv = m.basis.level_of(idx, k);
      if (lv == 1) rate += cavity.omega_c - drives[k].omega_uw;
      if (lv == 2) rate += cavity.omega_c;
    }
    m.frame_rates(idx) = rate;
  }
  return m;
}

SystemModel build_effective(Variant variant, const EffectiveParams& eff, int n_max) {
  SystemModel m;
  m.variant = variant;
  m.eff = eff;

  const double stark_cavity = eff.g * eff.g / eff.delta_c;          // per photon on |0>
  const double stark_drive = eff.omega_rabi * eff.omega_rabi / eff.delta_uw;  // on |1>

  switch (variant) {
    case Variant::eff_single: {
      m.basis = BasisDescriptor{1, 2, true, n_max};
      const int d = m.basis.dim();
      m.hamiltonian = Eigen::MatrixXcd::Zero(d, d);
      const Eigen::MatrixXcd c = m.annihilation();
      m.hamiltonian += -stark_cavity * (m.photon_number() * m.sigma(0, 0, 0));
      m.hamiltonian += (eff.delta - stark_drive) * m.sigma(0, 1, 1);
      const Eigen::MatrixXcd raman = c * m.sigma(0, 1, 0);  // c |1><0|
      m.hamiltonian += -eff.g_eff * (raman + raman.adjoint());
      m.ip_rates = Eigen::VectorXd::Zero(d);
      for (int idx = 0; idx < d; ++idx) {
        if (m.basis.level_of(idx, 0) == 1) m.ip_rates(idx) = eff.delta;
      }
      break;
    }
    case Variant::eff_two_photon: {
      m.basis = BasisDescriptor{2, 2, true, n_max};
      const int d = m.basis.dim();
      m.hamiltonian = Eigen::MatrixXcd::Zero(d, d);
      const Eigen::MatrixXcd n_ph = m.photon_number();
      const Eigen::MatrixXcd n_ph_rev =
          n_ph + Eigen::MatrixXcd::Identity(d, d);  // c c^dag = c^dag c + 1
      for (int i = 0; i < 2; ++i) {
        m.hamiltonian += -stark_cavity * (n_ph * m.sigma(i, 0, 0));
        m.hamiltonian += -stark_drive * m.sigma(i, 1, 1);
        m.hamiltonian += eff.gamma * (-n_ph * m.sigma(i, 0, 0) + n_ph_rev * m.sigma(i, 1, 1));
      }
      const Eigen::MatrixXcd flip = m.sigma(0, 1, 0) * m.sigma(1, 0, 1);
      m.hamiltonian += eff.gamma * (flip + flip.adjoint());
      m.ip_rates = Eigen::VectorXd::Zero(d);
      break;
    }
    case Variant::eff_two_vacuum: {
      m.basis = BasisDescriptor{2, 2, false, 0};
      const int d = m.basis.dim();
      m.hamiltonian = Eigen::MatrixXcd::Zero(d, d);
      m.hamiltonian += eff.gamma_prime * (m.sigma(0, 1, 1) + m.sigma(1, 1, 1));
      const Eigen::MatrixXcd flip = m.sigma(0, 1, 0) * m.sigma(1, 0, 1);
      m.hamiltonian += eff.gamma * (flip + flip.adjoint());
      m.ip_rates = Eigen::VectorXd::Zero(d);
      break;
    }
    case Variant::full_rotating:
      throw ConfigError("use build_full_rotating for the full model");
  }

  m.check_hermitian();
  return m;
}

SystemModel build_pairwise_vacuum(const EffectiveParams& eff, int n_squids,
                                  int active_a, int active_b) {
  if (active_a == active_b || active_a < 0 || active_b < 0 ||
      active_a >= n_squids || active_b >= n_squids) {
    throw ConfigError("pairwise coupling needs two distinct SQUID indices");
  }
  SystemModel m;
  m.variant = Variant::eff_two_vacuum;
  m.eff = eff;
  m.basis = BasisDescriptor{n_squids, 2, false, 0};
  const int d = m.basis.dim();
  m.hamiltonian = Eigen::MatrixXcd::Zero(d, d);
  m.hamiltonian += eff.gamma_prime * (m.sigma(active_a, 1, 1) + m.sigma(active_b, 1, 1));
  const Eigen::MatrixXcd flip = m.sigma(active_a, 1, 0) * m.sigma(active_b, 0, 1);
  m.hamiltonian += eff.gamma * (flip + flip.adjoint());
  m.ip_rates = Eigen::VectorXd::Zero(d);
  m.check_hermitian();
  return m;
}

}  // namespace squidcav
