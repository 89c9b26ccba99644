#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "squidcav/model.hpp"
#include "squidcav/spectrum.hpp"

namespace squidcav {

/// One microwave drive line. Omega is always direct; the drive frequency can
/// be given absolutely (GHz) or as a detuning from the |a> <-> |1> line.
struct DriveConfig {
  std::optional<double> omega_rabi;  ///< rad/s
  std::optional<double> omega_uw;    ///< rad/s (absolute drive frequency)
  std::optional<double> delta_uw;    ///< rad/s (detuning, conflicts with omega_uw)
};

struct SweepDescriptor {
  std::string parameter;       ///< JSON pointer into the config document
  std::vector<double> values;  ///< resolved value list (explicit or linspace)
};

struct StarkSweepConfig {
  double theta_min = 0.0;
  double theta_max = 4.0 * constants::pi;
  int steps = 256;
  /// Optional fixed input state, 8 numbers (re,im per amplitude); when
  /// absent the amplitudes are drawn from the seeded RNG per sweep point.
  std::optional<std::array<double, 8>> amplitudes;
};

struct TransferAmplitudes {
  std::optional<cplx> alpha;
  std::optional<cplx> beta;
};

struct FeasibilityConfig {
  std::optional<double> resistance;  ///< ohm
  std::optional<double> t1;          ///< s
  std::optional<double> p_a;
  std::optional<double> p_c;
  std::optional<double> g_eff_alt;   ///< 1/s
};

/// Fully validated experiment configuration. `doc` keeps the parsed JSON
/// (with CLI overrides already applied) as the hashing/sweep-patching
/// substrate; all other fields are the decoded, unit-converted values.
struct ExperimentConfig {
  nlohmann::json doc;

  SquidParams squid;
  GridConfig grid;

  std::optional<double> omega_c;        ///< rad/s
  std::optional<double> g_direct;       ///< 1/s
  std::optional<double> bc_integral;    ///< T m^2
  std::optional<double> buw_integral;   ///< T m^2
  std::optional<double> delta_c_direct; ///< 1/s; takes precedence over the
                                        ///< spectrum-derived detuning
  std::optional<double> detuning_ratio; ///< R: Delta_c = R g, Delta_uw = R Omega;
                                        ///< single-knob dispersive family
  int n_max = 5;
  std::optional<double> quality;

  std::vector<DriveConfig> drives;

  Variant variant = Variant::eff_two_vacuum;
  std::string experiment;

  std::optional<SweepDescriptor> sweep;
  StarkSweepConfig stark;
  TransferAmplitudes transfer;
  FeasibilityConfig feasibility;

  std::string out_dir = ".";
  std::uint64_t seed = 1;
};

/// Parse + schema-validate a config document. Unknown keys, type errors and
/// conflicting parametrizations are rejected with JSON-pointer paths.
[[nodiscard]] ExperimentConfig load_config_json(const nlohmann::json& doc);

/// Read the file, parse JSON, then load_config_json.
[[nodiscard]] ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Read + parse a JSON document (ConfigError on I/O or syntax problems).
[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& path);

/// FNV-1a 64-bit hash over the canonical serialization of the config with
/// the `output` section removed: stable across runs, sensitive to every
/// semantically meaningful field.
[[nodiscard]] std::string config_hash_hex(const nlohmann::json& doc);

/// Parse a model-variant name: the CLI shorthands "effective" and "full"
/// plus the explicit variant names.
[[nodiscard]] Variant parse_variant(const std::string& name);

}  // namespace squidcav
