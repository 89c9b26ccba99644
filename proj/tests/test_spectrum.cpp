#include <doctest.h>

#include <cmath>

#include "squidcav/constants.hpp"
#include "squidcav/errors.hpp"
#include "squidcav/spectrum.hpp"

namespace {

squidcav::SquidParams device_params() {
  squidcav::SquidParams p;
  p.capacitance = 90e-15;
  p.inductance = 100e-12;
  p.critical_current = 3.75e-6;
  p.phix_ratio = 0.4995;
  return p;
}

squidcav::GridConfig device_grid() {
  squidcav::GridConfig g;
  g.num_points = 512;
  g.halfwidth_phi0 = 0.35;
  g.level_a_index = 3;
  return g;
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("harmonic limit has no Lambda structure and the solver says so") {
  // With I_c = 0 the potential is a pure parabola centred on Phi_x; parity
  // then forbids every <0|Phi|k> and <1|Phi|k> for k >= 2, so no level can
  // serve as the intermediate |a>. The solver must refuse with a ConfigError
  // that lists the (all-negligible) candidates instead of silently returning
  // an unusable Lambda assignment.
  squidcav::SquidParams p = device_params();
  p.critical_current = 0.0;
  p.phix_ratio = 0.0;
  squidcav::GridConfig g;
  g.num_points = 512;
  g.halfwidth_phi0 = 0.25;
  g.level_a_index = 2;

  try {
    (void)squidcav::solve_squid_spectrum(p, g, 6);
    FAIL("expected a ConfigError for the parity-forbidden Lambda selection");
  } catch (const squidcav::ConfigError& err) {
    const std::string msg = err.what();
    CHECK(msg.find("Lambda") != std::string::npos);
    CHECK(msg.find("candidates") != std::string::npos);
  }
}

TEST_CASE("harmonic limit recovers the LC ladder on the bare solve") {
  // The bare spectral solve has no Lambda gating, so the exact I_c = 0 case
  // is checkable against the analytic oscillator: spacing hbar/sqrt(LC) and
  // <0|Phi|1> = sqrt(hbar Z / 2) with Z = sqrt(L/C).
  squidcav::SquidParams p = device_params();
  p.critical_current = 0.0;
  p.phix_ratio = 0.0;
  squidcav::GridConfig g;
  g.num_points = 512;
  g.halfwidth_phi0 = 0.25;

  const auto res = squidcav::solve_flux_spectrum(p, g, 6);
  const double omega_lc = 1.0 / std::sqrt(p.inductance * p.capacitance);

  for (int k = 0; k + 1 < 6; ++k) {
    const double spacing =
        (res.energies[k + 1] - res.energies[k]) / squidcav::constants::hbar;
    CHECK(spacing == doctest::Approx(omega_lc).epsilon(1e-6));
  }
  CHECK(res.energies[0] ==
        doctest::Approx(0.5 * squidcav::constants::hbar * omega_lc)
            .epsilon(1e-6));

  const double z = std::sqrt(p.inductance / p.capacitance);
  const double expected_me = std::sqrt(squidcav::constants::hbar * z / 2.0);
  CHECK(std::abs(res.flux_me(0, 1)) ==
        doctest::Approx(expected_me).epsilon(1e-6));
  // Parity forbids 0 <-> 2; the raised-index ladder element is sqrt(2) bigger.
  CHECK(std::abs(res.flux_me(0, 2)) < expected_me * 1e-8);
  CHECK(std::abs(res.flux_me(1, 2)) ==
        doctest::Approx(std::sqrt(2.0) * expected_me).epsilon(1e-6));
}

TEST_CASE("harmonic limit potential is the exact LC parabola") {
  squidcav::SquidParams p = device_params();
  p.critical_current = 0.0;
  squidcav::GridConfig g = device_grid();

  const auto profile = squidcav::potential_profile(p, g, 801);
  const double phix = p.phix_ratio * squidcav::constants::phi_0;
  for (const auto& [phi, u] : profile) {
    const double expected = (phi - phix) * (phi - phix) / (2.0 * p.inductance);
    CHECK(u == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("device point reproduces the design transition band") {
  const auto res = squidcav::solve_squid_spectrum(device_params(), device_grid());

  const double f_a0_ghz = res.omega_a0 / (2.0 * squidcav::constants::pi) / 1e9;
  // ~30 GHz |0> -> |a> transition at the operating bias.
  CHECK(f_a0_ghz > 26.0);
  CHECK(f_a0_ghz < 35.0);
  // Regression pin for the exact solver output.
  CHECK(f_a0_ghz == doctest::Approx(30.483907592272342).epsilon(1e-12));

  const double f_10_ghz = res.omega_10 / (2.0 * squidcav::constants::pi) / 1e9;
  CHECK(f_10_ghz > 1.0);
  CHECK(f_10_ghz < 15.0);

  CHECK(res.index_0 == 0);
  CHECK(res.index_1 == 1);
  CHECK(res.index_a == 3);
  CHECK(res.lambda_valid);

  // omega identities hold by construction.
  CHECK(res.omega_a0 ==
        doctest::Approx(res.omega_a1 + res.omega_10).epsilon(1e-14));

  // Both Lambda legs carry weight: |<0|Phi|a>| and |<1|Phi|a>| nonzero.
  const double leg0 = std::abs(res.flux_me(0, 2));
  const double leg1 = std::abs(res.flux_me(1, 2));
  CHECK(leg0 > 1e-18);
  CHECK(leg1 > 1e-18);

  // Flux matrix is symmetric (real wavefunctions).
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(res.flux_me(i, j) == doctest::Approx(res.flux_me(j, i)));
}

TEST_CASE("energies are strictly increasing and wavefunctions orthonormal") {
  const auto res = squidcav::solve_squid_spectrum(device_params(), device_grid());

  for (std::size_t k = 0; k + 1 < res.energies.size(); ++k) {
    CHECK(res.energies[k] < res.energies[k + 1]);
  }

  // Columns of `eigenvectors` are grid-orthonormal.
  const Eigen::MatrixXd overlap =
      res.eigenvectors.transpose() * res.eigenvectors;
  for (int i = 0; i < overlap.rows(); ++i) {
    for (int j = 0; j < overlap.cols(); ++j) {
      const double want = (i == j) ? 1.0 : 0.0;
      CHECK(std::abs(overlap(i, j) - want) < 1e-8);
    }
  }
}

TEST_CASE("grid doubling leaves the splitting stable") {
  auto grid = device_grid();
  grid.check_convergence = true;
  const auto res = squidcav::solve_squid_spectrum(device_params(), grid);
  CHECK(res.est_rel_error < 1e-6);
  CHECK(res.grid_points == 512);

  // Doubling by hand changes nothing physical.
  auto grid2 = grid;
  grid2.num_points = 1024;
  const auto res2 = squidcav::solve_squid_spectrum(device_params(), grid2);
  CHECK(res2.omega_a0 == doctest::Approx(res.omega_a0).epsilon(1e-9));
}

TEST_CASE("narrow domain trips the boundary-leak guard") {
  auto grid = device_grid();
  grid.halfwidth_phi0 = 0.05;  // clips the wavefunction tails hard
  grid.check_convergence = false;
  CHECK_THROWS_AS((void)squidcav::solve_squid_spectrum(device_params(), grid),
                  squidcav::NumericError);
}

TEST_CASE("configuration validation rejects junk") {
  squidcav::SquidParams p = device_params();
  p.capacitance = -1.0;
  CHECK_THROWS_AS(p.validate(), squidcav::ConfigError);

  squidcav::GridConfig g;
  g.num_points = 11;  // must be even and >= 64
  CHECK_THROWS_AS(g.validate(), squidcav::ConfigError);

  g = squidcav::GridConfig{};
  g.halfwidth_phi0 = 0.0;
  CHECK_THROWS_AS(g.validate(), squidcav::ConfigError);

  g = squidcav::GridConfig{};
  g.level_a_index = 1;  // must name a level above |1>
  CHECK_THROWS_AS(g.validate(), squidcav::ConfigError);
}

TEST_CASE("potential profile shows the double well at the operating point") {
  const auto p = device_params();
  CHECK(p.beta_l() == doctest::Approx(1.1395).epsilon(1e-3));

  squidcav::GridConfig g = device_grid();
  const auto profile = squidcav::potential_profile(p, g, 2001);
  CHECK(profile.size() == 2001);
  CHECK(squidcav::count_local_minima(profile) == 2);

  // Harmonic version has a single minimum.
  squidcav::SquidParams lc = p;
  lc.critical_current = 0.0;
  const auto lc_profile = squidcav::potential_profile(lc, g, 2001);
  CHECK(squidcav::count_local_minima(lc_profile) == 1);

  // At exact half-flux bias the potential is symmetric about Phi_x.
  squidcav::SquidParams sym = p;
  sym.phix_ratio = 0.5;
  const auto sp = squidcav::potential_profile(sym, g, 2001);
  const double phix = 0.5 * squidcav::constants::phi_0;
  for (std::size_t i = 0; i < sp.size() / 4; ++i) {
    const auto& left = sp[i];
    const auto& right = sp[sp.size() - 1 - i];
    CHECK(left.first - phix == doctest::Approx(-(right.first - phix)));
    CHECK(left.second == doctest::Approx(right.second).epsilon(1e-10));
  }
}

TEST_CASE("lambda candidates are ranked by coupling strength") {
  auto grid = device_grid();
  const auto res = squidcav::solve_squid_spectrum(device_params(), grid);
  REQUIRE(!res.lambda_candidates.empty());
  for (std::size_t k = 0; k + 1 < res.lambda_candidates.size(); ++k) {
    CHECK(res.lambda_candidates[k].second >=
          res.lambda_candidates[k + 1].second);
  }
  // The configured |a> (level 3, matching the design transition band) is
  // a valid candidate even though the raw min-leg ranking can prefer level 2;
  // the explicit grid.level_a_index override exists for exactly this reason.
  bool found = false;
  for (const auto& [idx, strength] : res.lambda_candidates) {
    if (idx == res.index_a) found = true;
  }
  CHECK(found);
  CHECK(res.lambda_valid);
}

}  // TEST_SUITE
