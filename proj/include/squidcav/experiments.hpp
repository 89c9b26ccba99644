#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "squidcav/config.hpp"
#include "squidcav/feasibility.hpp"
#include "squidcav/protocols.hpp"

namespace squidcav {

/// One experiment outcome. `duration_s` is console diagnostics only and is
/// never persisted, so identical configs produce byte-identical files.
struct ResultRecord {
  std::string experiment;
  std::string config_hash;
  std::string model_variant;
  std::string version;
  std::vector<std::string> warnings;
  nlohmann::json payload;
  bool failed = false;
  double duration_s = 0.0;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Files produced by an experiment, written atomically by the caller-facing
/// entry points; each pair is (relative filename, content).
struct ArtifactSet {
  std::vector<std::pair<std::string, std::string>> files;
};

/// Resolved physics inputs shared by the experiments: effective parameters
/// plus (when a derivation needed it) the solved spectrum.
struct ResolvedInputs {
  EffectiveParams eff;
  std::optional<SpectrumResult> spectrum;
  std::optional<double> omega_c;  ///< rad/s, when known
  std::vector<double> omega_rabi; ///< per configured drive
};

/// Derive EffectiveParams (and, lazily, the SQUID spectrum) from a config:
/// direct detunings take precedence; a detuning ratio R expands to
/// Delta_c = R g, Delta_uw = R Omega; otherwise detunings come from the
/// solved spectrum and the absolute cavity/drive frequencies.
[[nodiscard]] ResolvedInputs resolve_inputs(const ExperimentConfig& cfg);

/// Run the named experiment without touching the filesystem; artifacts are
/// returned for the caller to persist.
[[nodiscard]] ResultRecord compute_experiment(const ExperimentConfig& cfg,
                                              ArtifactSet* artifacts = nullptr);

/// compute_experiment + atomic artifact writes into cfg.out_dir.
[[nodiscard]] ResultRecord run_experiment(const ExperimentConfig& cfg);

/// One record per value, patching `parameter_path` in the config document.
/// Failures are isolated per point (a failed record carries an `error`
/// payload); nothing is written here — the CLI collects and persists once.
[[nodiscard]] std::vector<ResultRecord> sweep(const ExperimentConfig& cfg,
                                              const std::string& parameter_path,
                                              const std::vector<double>& values);

/// Serialize a list of sweep records (single-collector output).
[[nodiscard]] nlohmann::json sweep_report_json(
    const std::vector<ResultRecord>& records, const std::string& parameter_path,
    const std::vector<double>& values);

}  // namespace squidcav
