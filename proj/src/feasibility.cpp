#include "squidcav/feasibility.hpp"

#include <algorithm>
#include <cmath>

#include "squidcav/errors.hpp"

namespace squidcav {

double t1_from_resistance(double resistance_ohm) {
  if (!(resistance_ohm > 0.0)) {
    throw ConfigError("damping resistance must be positive");
  }
  return (resistance_ohm / 6.0e7) * 1.0e-6;
}

namespace {

FeasibilityReading make_reading(double g_eff, double delta, double t1_eff,
                                double t_c_eff) {
  if (!(g_eff > 0.0)) {
    throw ConfigError("effective coupling must be positive");
  }
  FeasibilityReading r;
  r.g_eff = g_eff;
  r.gamma = g_eff * g_eff / delta;
  r.t_sc = constants::pi / (2.0 * r.gamma);
  r.margin_a = t1_eff / r.t_sc;
  r.margin_c = t_c_eff / r.t_sc;
  r.pass_a = r.t_sc < 0.01 * t1_eff;
  r.pass_c = r.t_sc < 0.1 * t_c_eff;
  return r;
}

}  // namespace

FeasibilityReport feasibility_report(const FeasibilityInputs& inputs) {
  if (!inputs.t1.has_value() && !inputs.resistance.has_value()) {
    throw ConfigError(
        "feasibility needs either a direct T1 or a damping resistance");
  }
  if (!(inputs.quality > 0.0)) throw ConfigError("cavity Q must be positive");
  if (!(inputs.omega_c > 0.0)) {
    throw ConfigError("cavity frequency must be positive");
  }
  const EffectiveParams& eff = inputs.eff;
  if (!(eff.gamma > 0.0)) {
    throw ConfigError("feasibility needs gamma > 0 (positive delta)");
  }

  FeasibilityReport rep;
  rep.t1 = inputs.t1.has_value() ? *inputs.t1
                                 : t1_from_resistance(*inputs.resistance);
  if (!(rep.t1 > 0.0)) throw ConfigError("T1 must be positive");

  rep.p_a_perturbative =
      std::max((eff.g / eff.delta_c) * (eff.g / eff.delta_c),
               (eff.omega_rabi / eff.delta_uw) * (eff.omega_rabi / eff.delta_uw));
  rep.p_c_perturbative = (eff.g_eff / eff.delta) * (eff.g_eff / eff.delta);
  rep.p_a_used = inputs.p_a.value_or(rep.p_a_perturbative);
  rep.p_c_used = inputs.p_c.value_or(0.01);
  if (!(rep.p_a_used > 0.0) || !(rep.p_c_used > 0.0)) {
    throw ConfigError("peak populations must be positive");
  }

  rep.t1_eff = rep.t1 / rep.p_a_used;
  rep.t_c = inputs.quality / inputs.omega_c;
  rep.t_c_eff = rep.t_c / rep.p_c_used;

  rep.ratio_delta_c_over_g = eff.delta_c / eff.g;
  rep.ratio_delta_uw_over_omega =
      eff.omega_rabi != 0.0 ? eff.delta_uw / eff.omega_rabi : 0.0;
  rep.ratio_delta_over_g_eff =
      eff.g_eff != 0.0 ? eff.delta / eff.g_eff : 0.0;
  rep.chi = eff.chi;

  rep.formula = make_reading(eff.g_eff, eff.delta, rep.t1_eff, rep.t_c_eff);
  if (inputs.g_eff_alt.has_value()) {
    rep.alt = make_reading(*inputs.g_eff_alt, eff.delta, rep.t1_eff, rep.t_c_eff);
  }
  return rep;
}

}  // namespace squidcav
