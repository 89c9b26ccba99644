#pragma once

#include <optional>

#include "squidcav/model.hpp"

namespace squidcav {

/// Inputs for the feasibility arithmetic. T1 can be given directly or be
/// derived from the junction damping resistance; exactly one of the two is
/// required. Peak populations default to perturbative bounds when no
/// trajectory-measured values are supplied.
struct FeasibilityInputs {
  std::optional<double> resistance;  ///< junction damping resistance (ohm)
  std::optional<double> t1;          ///< |a> lifetime (s), overrides resistance
  double quality = 2.0e4;            ///< cavity Q_c
  double omega_c = 0.0;              ///< cavity angular frequency (rad/s)
  EffectiveParams eff;
  std::optional<double> p_a;          ///< measured peak |a> population
  std::optional<double> p_c;          ///< measured peak photon number
  std::optional<double> g_eff_alt;    ///< alternative effective-coupling reading
};

/// One evaluation of the timescale margins for a given effective coupling.
struct FeasibilityReading {
  double g_eff = 0.0;     ///< effective coupling used (1/s)
  double gamma = 0.0;     ///< g_eff^2 / delta (1/s)
  double t_sc = 0.0;      ///< single-hop interaction time pi/(2 gamma) (s)
  double margin_a = 0.0;  ///< (T1/P_a) / T_sc
  double margin_c = 0.0;  ///< (T_c/P_c) / T_sc
  bool pass_a = false;    ///< T_sc < 0.01 * (T1/P_a)
  bool pass_c = false;    ///< T_sc < 0.1  * (T_c/P_c)
};

struct FeasibilityReport {
  double t1 = 0.0;        ///< |a> lifetime (s)
  double t1_eff = 0.0;    ///< effective |a> decay time T1/P_a (s)
  double t_c = 0.0;       ///< cavity photon lifetime Q_c/omega_c (s)
  double t_c_eff = 0.0;   ///< effective cavity decay time T_c/P_c (s)

  double p_a_used = 0.0;
  double p_c_used = 0.0;
  double p_a_perturbative = 0.0;  ///< max((g/Delta_c)^2, (Omega/Delta_uw)^2)
  double p_c_perturbative = 0.0;  ///< (g_eff/delta)^2

  double ratio_delta_c_over_g = 0.0;
  double ratio_delta_uw_over_omega = 0.0;
  double ratio_delta_over_g_eff = 0.0;
  double chi = 0.0;

  FeasibilityReading formula;               ///< margins at the derived g_eff
  std::optional<FeasibilityReading> alt;    ///< margins at g_eff_alt, if given
};

/// T1 = (R / 60 Mohm) microseconds.
[[nodiscard]] double t1_from_resistance(double resistance_ohm);

/// Deterministic timescale arithmetic; see FeasibilityReport fields.
/// Throws ConfigError when neither t1 nor resistance is present, or when
/// quality/omega_c/gamma are not positive.
[[nodiscard]] FeasibilityReport feasibility_report(const FeasibilityInputs& inputs);

}  // namespace squidcav
