#include "squidcav/experiments.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "squidcav/io.hpp"
#include "squidcav/version.hpp"

namespace squidcav {

namespace {

using nlohmann::json;

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json vec_json(const Eigen::VectorXcd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(cplx_json(v(i)));
  return arr;
}

json mat_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(cplx_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::verification: return "verification";
    case ErrorCategory::numeric: return "numeric";
  }
  return "unknown";
}

json protocol_report_json(const ProtocolReport& rep,
                          const std::string& trajectory_csv_name) {
  json j;
  j["protocol"] = rep.protocol;
  j["model_variant"] = variant_name(rep.variant);
  j["fidelity"] = rep.fidelity;
  j["distance"] = rep.distance;
  j["phase_removed_residual"] = rep.phase_removed_residual;
  j["gamma_t"] = rep.gamma_t;
  j["gamma_prime_t"] = rep.gamma_prime_t;
  j["chi"] = rep.chi;
  j["t_total_s"] = rep.t_total;
  j["peak_pop_a"] = rep.peak_pop_a;
  j["peak_n_photon"] = rep.peak_n_photon;
  if (rep.target_state.size() > 0) j["target_state"] = vec_json(rep.target_state);
  if (rep.achieved_state.size() > 0) {
    j["achieved_state"] = vec_json(rep.achieved_state);
  }
  if (rep.intermediate_state.size() > 0) {
    j["intermediate_state"] = vec_json(rep.intermediate_state);
  }
  if (rep.target_unitary.size() > 0) {
    j["target_unitary"] = mat_json(rep.target_unitary);
  }
  if (rep.achieved_unitary.size() > 0) {
    j["achieved_unitary"] = mat_json(rep.achieved_unitary);
  }
  if (!rep.fidelity_vs_target.empty()) {
    j["fidelity_vs_target"] = rep.fidelity_vs_target;
  }
  j["trajectory_samples"] = rep.trajectory.times.size();
  if (!trajectory_csv_name.empty()) j["trajectory_csv"] = trajectory_csv_name;
  return j;
}

/// Protocol model per configured variant; full models replicate the drive
/// settings across SQUIDs when a single drive is configured.
SystemModel make_protocol_model(const ExperimentConfig& cfg,
                                const ResolvedInputs& rin, int n_squids) {
  switch (cfg.variant) {
    case Variant::eff_two_vacuum:
      return build_effective(Variant::eff_two_vacuum, rin.eff);
    case Variant::eff_two_photon:
      return build_effective(Variant::eff_two_photon, rin.eff, cfg.n_max);
    case Variant::eff_single:
      return build_effective(Variant::eff_single, rin.eff, cfg.n_max);
    case Variant::full_rotating: {
      std::vector<double> omegas = rin.omega_rabi;
      if (omegas.size() == 1 && n_squids > 1) {
        omegas.assign(static_cast<std::size_t>(n_squids), omegas.front());
      }
      if (omegas.size() != static_cast<std::size_t>(n_squids)) {
        throw ConfigError("drive count does not match the SQUID count");
      }
      const std::vector<double> deltas(static_cast<std::size_t>(n_squids),
                                       rin.eff.delta);
      SystemModel m = build_full_rotating_from_detunings(
          rin.eff.g, rin.eff.delta_c, omegas, deltas, cfg.n_max);
      m.eff = rin.eff;
      return m;
    }
  }
  throw ConfigError("unsupported model variant");
}

bool include_cavity_columns(Variant v) { return v != Variant::eff_two_vacuum; }

std::string trajectory_csv_name(const std::string& experiment) {
  return experiment + "_trajectory.csv";
}

std::pair<cplx, cplx> transfer_amplitudes(const ExperimentConfig& cfg) {
  cplx alpha, beta;
  if (cfg.transfer.alpha.has_value()) {
    alpha = *cfg.transfer.alpha;
    beta = cfg.transfer.beta.value_or(cplx(0.0, 0.0));
  } else {
    std::mt19937_64 eng(cfg.seed);
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    alpha = cplx(unit_normal(eng), unit_normal(eng));
    beta = cplx(unit_normal(eng), unit_normal(eng));
  }
  const double n = std::sqrt(std::norm(alpha) + std::norm(beta));
  if (!(n > 1e-12)) {
    throw ConfigError("transfer amplitudes must not both be zero");
  }
  return {alpha / n, beta / n};
}

}  // namespace

json ResultRecord::to_json() const {
  json j;
  j["artifact_version"] = version;
  j["experiment"] = experiment;
  j["config_hash"] = config_hash;
  j["model_variant"] = model_variant;
  j["ok"] = !failed;
  j["warnings"] = warnings;
  j["payload"] = payload;
  return j;
}

ResolvedInputs resolve_inputs(const ExperimentConfig& cfg) {
  ResolvedInputs out;
  out.omega_c = cfg.omega_c;

  const auto spectrum = [&]() -> const SpectrumResult& {
    if (!out.spectrum) {
      out.spectrum = solve_squid_spectrum(cfg.squid, cfg.grid);
    }
    return *out.spectrum;
  };

  if (cfg.drives.empty()) {
    throw ConfigError("this experiment needs at least one drive entry");
  }

  double g = 0.0;
  if (cfg.g_direct) {
    g = *cfg.g_direct;
  } else if (cfg.bc_integral) {
    if (!cfg.omega_c) {
      throw ConfigError(
          "deriving g from coupling.Bc_integral_Tm2 needs cavity.omega_c_GHz");
    }
    CavityParams cav;
    cav.omega_c = *cfg.omega_c;
    CouplingInputs ci;
    ci.bc_integral = *cfg.bc_integral;
    g = coupling_g(spectrum(), ci, cav, cfg.squid);
  } else {
    throw ConfigError(
        "cavity coupling missing: give cavity.g_per_s or "
        "coupling.Bc_integral_Tm2");
  }
  if (!(g > 0.0)) throw ConfigError("cavity coupling must be positive");

  for (std::size_t i = 0; i < cfg.drives.size(); ++i) {
    const DriveConfig& d = cfg.drives[i];
    if (d.omega_rabi) {
      out.omega_rabi.push_back(*d.omega_rabi);
    } else if (cfg.buw_integral) {
      CouplingInputs ci;
      ci.buw_integral = *cfg.buw_integral;
      out.omega_rabi.push_back(rabi_omega(spectrum(), ci, cfg.squid));
    } else {
      throw ConfigError("drive " + std::to_string(i) +
                        " is missing Omega_per_s (and no "
                        "coupling.Buw_integral_Tm2 is given)");
    }
  }

  double delta_c = 0.0;
  double delta_uw = 0.0;
  if (cfg.detuning_ratio) {
    delta_c = *cfg.detuning_ratio * g;
    delta_uw = *cfg.detuning_ratio * out.omega_rabi.front();
  } else {
    if (cfg.delta_c_direct) {
      delta_c = *cfg.delta_c_direct;
    } else if (cfg.omega_c) {
      delta_c = spectrum().omega_a0 - *cfg.omega_c;
    } else {
      throw ConfigError(
          "cavity detuning missing: give cavity.Delta_c_per_s or "
          "cavity.omega_c_GHz");
    }
    const DriveConfig& d0 = cfg.drives.front();
    if (d0.delta_uw) {
      delta_uw = *d0.delta_uw;
    } else if (d0.omega_uw) {
      delta_uw = spectrum().omega_a1 - *d0.omega_uw;
    } else {
      throw ConfigError(
          "drive detuning missing: give drive[0].Delta_uw_per_s or "
          "drive[0].omega_uw_GHz");
    }
  }

  out.eff = EffectiveParams::from_detunings(g, out.omega_rabi.front(), delta_c,
                                            delta_uw);
  return out;
}

namespace {

void run_spectrum(const ExperimentConfig& cfg, ResultRecord& rec,
                  ArtifactSet* artifacts) {
  const SpectrumResult sr = solve_squid_spectrum(cfg.squid, cfg.grid);

  json levels = json::array();
  const auto label_of = [&](int i) -> std::string {
    if (i == sr.index_0) return "0";
    if (i == sr.index_1) return "1";
    if (i == sr.index_a) return "a";
    return std::to_string(i);
  };
  for (std::size_t i = 0; i < sr.energies.size(); ++i) {
    levels.push_back(
        {{"level", label_of(static_cast<int>(i))},
         {"index", i},
         {"E_over_h_GHz", sr.energies[i] / constants::h_planck / 1e9}});
  }

  json& p = rec.payload;
  p["beta_l"] = cfg.squid.beta_l();
  p["levels"] = levels;
  p["omega_10_per_s"] = sr.omega_10;
  p["omega_a1_per_s"] = sr.omega_a1;
  p["omega_a0_per_s"] = sr.omega_a0;
  p["omega_a0_over_2pi_GHz"] = constants::rad_per_s_to_ghz(sr.omega_a0);
  p["level_indices"] = {{"0", sr.index_0}, {"1", sr.index_1}, {"a", sr.index_a}};
  p["lambda_valid"] = sr.lambda_valid;
  p["est_rel_error"] = sr.est_rel_error;
  p["grid_points"] = sr.grid_points;
  if (!sr.lambda_valid) {
    rec.warnings.push_back(
        "selected levels do not rank as the best Lambda candidate; see "
        "lambda_candidates");
  }

  if (artifacts) {
    io::CsvWriter lvl({"level", "index", "E_over_h_GHz"});
    for (std::size_t i = 0; i < sr.energies.size(); ++i) {
      lvl.add_row({label_of(static_cast<int>(i)), std::to_string(i),
                   io::format_sig17(sr.energies[i] / constants::h_planck / 1e9)});
    }
    artifacts->files.emplace_back("spectrum_levels.csv", lvl.str());

    const int idx[3] = {sr.index_0, sr.index_1, sr.index_a};
    io::CsvWriter me({"i", "j", "flux_me_Wb"});
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        me.add_row({std::to_string(idx[r]), std::to_string(idx[c]),
                    io::format_sig17(sr.flux_me(r, c))});
      }
    }
    artifacts->files.emplace_back("spectrum_flux_me.csv", me.str());
  }
}

void run_protocol(const ExperimentConfig& cfg, ResultRecord& rec,
                  ArtifactSet* artifacts) {
  const ResolvedInputs rin = resolve_inputs(cfg);
  ProtocolReport rep;
  std::vector<std::string> model_warnings;

  if (cfg.experiment == "bell") {
    SystemModel model = make_protocol_model(cfg, rin, 2);
    model_warnings = model.warnings;
    rep = generate_bell(model, rin.eff);
    // Entanglement of the logical two-qubit block (post-selected on the
    // computational subspace for models with leakage levels).
    Eigen::VectorXcd logical(4);
    if (rep.achieved_state.size() == 4) {
      logical = rep.achieved_state;
    } else {
      for (int q1 = 0; q1 < 2; ++q1)
        for (int q2 = 0; q2 < 2; ++q2)
          logical(q1 * 2 + q2) =
              rep.achieved_state(model.basis.index_of({q1, q2}, 0));
    }
    if (logical.norm() > 0.0) {
      rec.payload["concurrence"] = concurrence(logical / logical.norm());
    }
  } else if (cfg.experiment == "transfer") {
    SystemModel model = make_protocol_model(cfg, rin, 2);
    model_warnings = model.warnings;
    const auto [alpha, beta] = transfer_amplitudes(cfg);
    rep = transfer_state(model, rin.eff, alpha, beta);
    rec.payload["alpha"] = cplx_json(alpha);
    rec.payload["beta"] = cplx_json(beta);
  } else if (cfg.experiment == "cnot") {
    if (cfg.variant == Variant::full_rotating) {
      rep = cnot_full(rin.eff, cfg.n_max);
    } else {
      rep = cnot_unitary(rin.eff);
      rec.payload["reading"] = cnot_default_reading();
    }
  } else if (cfg.experiment == "swap") {
    if (cfg.variant == Variant::full_rotating) {
      rep = swap_full(rin.eff, cfg.n_max);
    } else {
      const SystemModel reg = build_pairwise_vacuum(rin.eff, 3, 0, 2);
      rep = swap_via_ancilla(reg, rin.eff);
    }
  } else {
    throw ConfigError("unknown protocol experiment: " + cfg.experiment);
  }

  const bool has_traj = !rep.trajectory.times.empty();
  const std::string csv_name =
      has_traj ? trajectory_csv_name(cfg.experiment) : std::string();
  json report = protocol_report_json(rep, csv_name);
  for (auto& [key, value] : report.items()) rec.payload[key] = value;
  for (const std::string& w : model_warnings) rec.warnings.push_back(w);
  rec.model_variant = variant_name(rep.variant);

  if (artifacts && has_traj) {
    artifacts->files.emplace_back(
        csv_name, io::trajectory_csv(rep.trajectory, rep.fidelity_vs_target,
                                     include_cavity_columns(rep.variant)));
  }
}

void run_stark_sweep(const ExperimentConfig& cfg, ResultRecord& rec,
                     ArtifactSet* artifacts) {
  const ResolvedInputs rin = resolve_inputs(cfg);
  const StarkSweepConfig& sc = cfg.stark;

  std::array<cplx, 4> fixed{};
  bool use_fixed = sc.amplitudes.has_value();
  if (use_fixed) {
    double norm_sq = 0.0;
    for (int i = 0; i < 4; ++i) {
      fixed[static_cast<std::size_t>(i)] =
          cplx((*sc.amplitudes)[2 * static_cast<std::size_t>(i)],
               (*sc.amplitudes)[2 * static_cast<std::size_t>(i) + 1]);
      norm_sq += std::norm(fixed[static_cast<std::size_t>(i)]);
    }
    if (!(norm_sq > 1e-24)) {
      throw ConfigError("stark.amplitudes must not be all zero");
    }
    for (auto& a : fixed) a /= std::sqrt(norm_sq);
  }

  std::mt19937_64 eng(cfg.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  const auto draw_state = [&]() {
    std::array<cplx, 4> amps;
    double norm_sq = 0.0;
    for (auto& a : amps) {
      a = cplx(unit_normal(eng), unit_normal(eng));
      norm_sq += std::norm(a);
    }
    for (auto& a : amps) a /= std::sqrt(norm_sq);
    return amps;
  };

  io::CsvWriter csv({"theta", "Pe_closed_form", "Pe_oracle", "abs_diff"});
  double max_abs_diff = 0.0;
  for (int k = 0; k < sc.steps; ++k) {
    const double theta =
        sc.steps == 1
            ? sc.theta_min
            : sc.theta_min + (sc.theta_max - sc.theta_min) *
                                 static_cast<double>(k) / (sc.steps - 1);
    const std::array<cplx, 4> amps = use_fixed ? fixed : draw_state();
    const StarkErrorResult res = stark_error(amps, theta, rin.eff.chi);
    const double diff = std::abs(res.pe_closed_form - res.pe_oracle);
    max_abs_diff = std::max(max_abs_diff, diff);
    csv.add_row({io::format_sig17(theta), io::format_sig17(res.pe_closed_form),
                 io::format_sig17(res.pe_oracle), io::format_sig17(diff)});
  }

  rec.payload["steps"] = sc.steps;
  rec.payload["theta_min"] = sc.theta_min;
  rec.payload["theta_max"] = sc.theta_max;
  rec.payload["chi"] = rin.eff.chi;
  rec.payload["amplitudes_mode"] = use_fixed ? "fixed" : "random";
  rec.payload["max_abs_diff"] = max_abs_diff;
  rec.payload["sweep_csv"] = "stark_sweep.csv";
  if (artifacts) {
    artifacts->files.emplace_back("stark_sweep.csv", csv.str());
  }
}

void run_feasibility(const ExperimentConfig& cfg, ResultRecord& rec) {
  const ResolvedInputs rin = resolve_inputs(cfg);
  if (!cfg.omega_c) {
    throw ConfigError("feasibility needs cavity.omega_c_GHz for T_c");
  }

  FeasibilityInputs fin;
  fin.resistance = cfg.feasibility.resistance;
  fin.t1 = cfg.feasibility.t1;
  fin.quality = cfg.quality.value_or(2.0e4);
  fin.omega_c = *cfg.omega_c;
  fin.eff = rin.eff;
  fin.p_a = cfg.feasibility.p_a;
  fin.p_c = cfg.feasibility.p_c;
  fin.g_eff_alt = cfg.feasibility.g_eff_alt;
  const FeasibilityReport fr = feasibility_report(fin);

  json& p = rec.payload;
  p["t1_s"] = fr.t1;
  p["t1_eff_s"] = fr.t1_eff;
  p["t_c_s"] = fr.t_c;
  p["t_c_eff_s"] = fr.t_c_eff;
  p["p_a_used"] = fr.p_a_used;
  p["p_c_used"] = fr.p_c_used;
  p["p_a_perturbative"] = fr.p_a_perturbative;
  p["p_c_perturbative"] = fr.p_c_perturbative;
  p["ratio_delta_c_over_g"] = fr.ratio_delta_c_over_g;
  p["ratio_delta_uw_over_omega"] = fr.ratio_delta_uw_over_omega;
  p["ratio_delta_over_g_eff"] = fr.ratio_delta_over_g_eff;
  p["chi"] = fr.chi;
  const auto reading_json = [](const FeasibilityReading& r) {
    return json{{"g_eff_per_s", r.g_eff}, {"gamma_per_s", r.gamma},
                {"t_sc_s", r.t_sc},       {"margin_a", r.margin_a},
                {"margin_c", r.margin_c}, {"pass_a", r.pass_a},
                {"pass_c", r.pass_c}};
  };
  p["formula"] = reading_json(fr.formula);
  if (fr.alt) p["alt"] = reading_json(*fr.alt);
}

}  // namespace

ResultRecord compute_experiment(const ExperimentConfig& cfg,
                                ArtifactSet* artifacts) {
  const auto started = std::chrono::steady_clock::now();

  ResultRecord rec;
  rec.experiment = cfg.experiment;
  rec.config_hash = config_hash_hex(cfg.doc);
  rec.model_variant = variant_name(cfg.variant);
  rec.version = kVersion;

  if (cfg.experiment.empty()) {
    throw ConfigError("config has no 'experiment' field");
  }
  if (cfg.experiment == "spectrum") {
    run_spectrum(cfg, rec, artifacts);
  } else if (cfg.experiment == "bell" || cfg.experiment == "transfer" ||
             cfg.experiment == "cnot" || cfg.experiment == "swap") {
    run_protocol(cfg, rec, artifacts);
  } else if (cfg.experiment == "stark-sweep") {
    run_stark_sweep(cfg, rec, artifacts);
  } else if (cfg.experiment == "feasibility") {
    run_feasibility(cfg, rec);
  } else {
    throw ConfigError(
        "unknown experiment '" + cfg.experiment +
        "' (expected bell, transfer, cnot, swap, stark-sweep, spectrum or "
        "feasibility)");
  }

  rec.duration_s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return rec;
}

ResultRecord run_experiment(const ExperimentConfig& cfg) {
  ArtifactSet artifacts;
  ResultRecord rec = compute_experiment(cfg, &artifacts);

  const std::filesystem::path out_dir(cfg.out_dir);
  std::string report_name = cfg.experiment + "_report.json";
  for (char& c : report_name) {
    if (c == '-') c = '_';
  }
  io::atomic_write(out_dir / report_name, rec.to_json().dump(2) + "\n");
  for (const auto& [name, content] : artifacts.files) {
    io::atomic_write(out_dir / name, content);
  }
  return rec;
}

std::vector<ResultRecord> sweep(const ExperimentConfig& cfg,
                                const std::string& parameter_path,
                                const std::vector<double>& values) {
  nlohmann::json::json_pointer ptr;
  try {
    ptr = nlohmann::json::json_pointer(parameter_path);
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("sweep parameter is not a valid JSON pointer: " +
                      parameter_path);
  }
  if (!cfg.doc.contains(ptr) || !cfg.doc.at(ptr).is_number()) {
    throw ConfigError(
        "sweep parameter path does not resolve to a numeric config field: " +
        parameter_path);
  }

  std::vector<ResultRecord> records;
  records.reserve(values.size());
  for (double v : values) {
    nlohmann::json patched = cfg.doc;
    patched[ptr] = v;
    try {
      const ExperimentConfig point_cfg = load_config_json(patched);
      ResultRecord rec = compute_experiment(point_cfg);
      rec.payload["swept_value"] = v;
      records.push_back(std::move(rec));
    } catch (const Error& err) {
      ResultRecord rec;
      rec.experiment = cfg.experiment;
      rec.config_hash = config_hash_hex(patched);
      rec.model_variant = variant_name(cfg.variant);
      rec.version = kVersion;
      rec.failed = true;
      rec.payload = {{"swept_value", v},
                     {"error",
                      {{"category", category_name(err.category())},
                       {"message", err.what()},
                       {"exit_code", err.exit_code()}}}};
      records.push_back(std::move(rec));
    }
  }
  return records;
}

nlohmann::json sweep_report_json(const std::vector<ResultRecord>& records,
                                 const std::string& parameter_path,
                                 const std::vector<double>& values) {
  nlohmann::json j;
  j["artifact_version"] = kVersion;
  j["parameter"] = parameter_path;
  j["values"] = values;
  nlohmann::json recs = nlohmann::json::array();
  for (const ResultRecord& r : records) recs.push_back(r.to_json());
  j["records"] = std::move(recs);
  return j;
}

}  // namespace squidcav
