#include "squidcav/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace squidcav {

namespace {

using constants::hbar;
using constants::phi_0;
using constants::pi;

/// Flux potential U(Phi) = (Phi - Phi_x)^2 / 2L - E_J cos(2 pi Phi / Phi_0).
double potential(const SquidParams& p, double phi) {
  const double phix = p.phix_ratio * phi_0;
  const double d = phi - phix;
  return d * d / (2.0 * p.inductance) -
         p.josephson_energy() * std::cos(2.0 * pi * phi / phi_0);
}

struct RawSolve {
  std::vector<double> grid;
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;  // one column per level, grid-normalized
};

/// Fourier-grid Hamiltonian on a uniform periodic grid of even size N over
/// [Phi_x - W, Phi_x + W): kinetic matrix elements are analytic in the plane-
/// wave basis, giving spectral accuracy for smooth potentials.
RawSolve fgh_solve(const SquidParams& p, int n_points, double halfwidth_phi0,
                   int n_levels) {
  const double phix = p.phix_ratio * phi_0;
  const double w = halfwidth_phi0 * phi_0;
  const double l_tot = 2.0 * w;
  const int n = n_points;
  const double dphi = l_tot / n;

  RawSolve out;
  out.grid.resize(n);
  for (int i = 0; i < n; ++i) out.grid[i] = phix - w + i * dphi;

  const double kin = (hbar * hbar / (2.0 * p.capacitance)) *
                     (2.0 * pi * pi / (l_tot * l_tot));

  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = kin * ((static_cast<double>(n) - 1.0) * (n - 2.0) / 6.0 + n / 2.0) +
              potential(p, out.grid[i]);
    for (int j = 0; j < i; ++j) {
      const int d = i - j;
      const double s = std::sin(pi * d / static_cast<double>(n));
      const double v = ((d % 2 == 0) ? 1.0 : -1.0) * kin / (s * s);
      h(i, j) = v;
      h(j, i) = v;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericError("flux-Hamiltonian eigensolve did not converge");
  }
  out.energies = es.eigenvalues().head(n_levels);
  out.vectors = es.eigenvectors().leftCols(n_levels);
  return out;
}

double matrix_element(const RawSolve& s, int i, int j) {
  double acc = 0.0;
  for (int k = 0; k < static_cast<int>(s.grid.size()); ++k) {
    acc += s.vectors(k, i) * s.grid[k] * s.vectors(k, j);
  }
  return acc;
}

double boundary_tail(const RawSolve& s, int level) {
  const auto col = s.vectors.col(level);
  const double peak = col.cwiseAbs().maxCoeff();
  return std::max(std::abs(col(0)), std::abs(col(col.size() - 1))) / peak;
}

}  // namespace

void SquidParams::validate() const {
  if (!(capacitance > 0.0)) throw ConfigError("squid capacitance must be > 0");
  if (!(inductance > 0.0)) throw ConfigError("squid inductance must be > 0");
  if (critical_current < 0.0) throw ConfigError("squid critical current must be >= 0");
  if (phix_ratio < 0.0 || phix_ratio >= 1.0) {
    throw ConfigError("external flux ratio must lie in [0, 1)");
  }
}

void GridConfig::validate() const {
  if (num_points < 64) throw ConfigError("grid.points must be >= 64");
  if (num_points % 2 != 0) throw ConfigError("grid.points must be even");
  if (!(halfwidth_phi0 > 0.0)) throw ConfigError("grid.halfwidth_Phi0 must be > 0");
  if (level_a_index < 2 || level_a_index > 5) {
    throw ConfigError("grid.level_a_index must lie in [2, 5]");
  }
}

SpectrumResult solve_squid_spectrum(const SquidParams& params,
                                    const GridConfig& grid, int n_levels) {
  params.validate();
  grid.validate();
  n_levels = std::max({n_levels, 6, grid.level_a_index + 1});

  const RawSolve s = fgh_solve(params, grid.num_points, grid.halfwidth_phi0, n_levels);

  SpectrumResult r;
  r.grid_points = grid.num_points;
  r.grid_flux = s.grid;
  r.energies.assign(s.energies.data(), s.energies.data() + n_levels);
  r.eigenvectors = s.vectors;
  for (int k = 1; k < n_levels; ++k) {
    if (!(r.energies[k] > r.energies[k - 1])) {
      throw NumericError("eigenenergies are not strictly increasing");
    }
  }

  r.index_0 = 0;
  r.index_1 = 1;
  r.index_a = grid.level_a_index;

  // Lambda-coupling strength of each candidate intermediate level: the
  // smaller of its two transition matrix elements to the qubit levels.
  const double me01 = std::abs(matrix_element(s, 0, 1));
  for (int k = 2; k <= 5 && k < n_levels; ++k) {
    const double leg0 = std::abs(matrix_element(s, 0, k));
    const double leg1 = std::abs(matrix_element(s, 1, k));
    r.lambda_candidates.emplace_back(k, std::min(leg0, leg1));
  }
  std::stable_sort(r.lambda_candidates.begin(), r.lambda_candidates.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  const double threshold = 0.01 * me01;
  const double leg0a = std::abs(matrix_element(s, 0, r.index_a));
  const double leg1a = std::abs(matrix_element(s, 1, r.index_a));
  r.lambda_valid = leg0a >= threshold && leg1a >= threshold;
  if (!r.lambda_valid) {
    std::ostringstream msg;
    msg << "level " << r.index_a << " fails the Lambda validity check "
        << "(|<0|Phi|a>| = " << leg0a << ", |<1|Phi|a>| = " << leg1a
        << ", threshold = " << threshold << "); candidates by coupling strength:";
    for (const auto& [idx, strength] : r.lambda_candidates) {
      msg << " " << idx << " (" << strength << ")";
    }
    throw ConfigError(msg.str());
  }

  // Boundary-leak check on the eigenfunctions that enter matrix elements.
  for (int level : {r.index_0, r.index_1, r.index_a}) {
    const double tail = boundary_tail(s, level);
    if (tail > 1e-8) {
      std::ostringstream msg;
      msg << "eigenfunction " << level << " leaks at the domain boundary (tail "
          << tail << " of peak, limit 1e-8); widen grid.halfwidth_Phi0";
      throw NumericError(msg.str());
    }
  }

  r.omega_10 = (r.energies[1] - r.energies[0]) / hbar;
  r.omega_a1 = (r.energies[r.index_a] - r.energies[1]) / hbar;
  r.omega_a0 = r.omega_a1 + r.omega_10;

  const int idx[3] = {r.index_0, r.index_1, r.index_a};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r.flux_me(i, j) = matrix_element(s, idx[i], idx[j]);
    }
  }
  r.mean_flux.resize(n_levels);
  for (int k = 0; k < n_levels; ++k) r.mean_flux[k] = matrix_element(s, k, k);

  if (grid.check_convergence) {
    const RawSolve s2 =
        fgh_solve(params, 2 * grid.num_points, grid.halfwidth_phi0, n_levels);
    const double gap1 = r.energies[r.index_a] - r.energies[0];
    const double gap2 = s2.energies(r.index_a) - s2.energies(0);
    r.est_rel_error = std::abs(gap2 - gap1) / std::abs(gap1);
    if (r.est_rel_error > 1e-6) {
      std::ostringstream msg;
      msg << "grid doubling shifts E_a - E_0 by relative " << r.est_rel_error
          << " (limit 1e-6); increase grid.points";
      throw NumericError(msg.str());
    }
  }

  return r;
}

FluxSpectrum solve_flux_spectrum(const SquidParams& params,
                                 const GridConfig& grid, int n_levels) {
  params.validate();
  grid.validate();
  if (n_levels < 2) throw ConfigError("at least 2 levels are required");

  const RawSolve s =
      fgh_solve(params, grid.num_points, grid.halfwidth_phi0, n_levels);

  FluxSpectrum out;
  out.energies.assign(s.energies.data(), s.energies.data() + n_levels);
  for (int k = 1; k < n_levels; ++k) {
    if (!(out.energies[k] > out.energies[k - 1])) {
      throw NumericError("eigenenergies are not strictly increasing");
    }
  }
  for (int level = 0; level < n_levels; ++level) {
    const double tail = boundary_tail(s, level);
    if (tail > 1e-8) {
      std::ostringstream msg;
      msg << "eigenfunction " << level << " leaks at the domain boundary (tail "
          << tail << " of peak, limit 1e-8); widen grid.halfwidth_Phi0";
      throw NumericError(msg.str());
    }
  }
  out.flux_me.resize(n_levels, n_levels);
  for (int i = 0; i < n_levels; ++i) {
    for (int j = 0; j < n_levels; ++j) {
      out.flux_me(i, j) = matrix_element(s, i, j);
    }
  }
  return out;
}

std::vector<std::pair<double, double>> potential_profile(
    const SquidParams& params, const GridConfig& grid, int samples) {
  params.validate();
  if (samples < 2) throw ConfigError("potential profile needs >= 2 samples");
  const double phix = params.phix_ratio * phi_0;
  const double w = grid.halfwidth_phi0 * phi_0;
  std::vector<std::pair<double, double>> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double phi = phix - w + 2.0 * w * i / (samples - 1);
    out.emplace_back(phi, potential(params, phi));
  }
  return out;
}

int count_local_minima(const std::vector<std::pair<double, double>>& profile) {
  int count = 0;
  for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
    if (profile[i].second < profile[i - 1].second &&
        profile[i].second < profile[i + 1].second) {
      ++count;
    }
  }
  return count;
}

}  // namespace squidcav
