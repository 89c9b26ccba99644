#include "squidcav/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "squidcav/errors.hpp"

namespace squidcav {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
  throw ConfigError("config error at " + (pointer.empty() ? "/" : pointer) +
                    ": " + what);
}

void require_object(const json& j, const std::string& pointer) {
  if (!j.is_object()) fail(pointer, "expected an object");
}

void check_keys(const json& j, const std::string& pointer,
                const std::set<std::string>& allowed) {
  require_object(j, pointer);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) fail(pointer + "/" + key, "unknown config key");
  }
}

double get_number(const json& j, const std::string& pointer) {
  if (!j.is_number()) fail(pointer, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(pointer, "expected a finite number");
  return v;
}

int get_integer(const json& j, const std::string& pointer) {
  if (!j.is_number_integer()) fail(pointer, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& pointer) {
  if (!j.is_string()) fail(pointer, "expected a string");
  return j.get<std::string>();
}

template <typename T, typename Getter>
void maybe(const json& obj, const std::string& pointer, const char* key,
           std::optional<T>& dst, Getter getter) {
  if (obj.contains(key)) dst = getter(obj.at(key), pointer + "/" + key);
}

void conflict_if_both(const json& obj, const std::string& pointer,
                      const char* a, const char* b) {
  if (obj.contains(a) && obj.contains(b)) {
    fail(pointer, std::string("conflicting keys: ") + a + " and " + b +
                      " parametrize the same quantity");
  }
}

}  // namespace

Variant parse_variant(const std::string& name) {
  if (name == "effective" || name == "eff_two_vacuum") {
    return Variant::eff_two_vacuum;
  }
  if (name == "full" || name == "full_rotating") return Variant::full_rotating;
  if (name == "eff_single") return Variant::eff_single;
  if (name == "eff_two_photon") return Variant::eff_two_photon;
  throw ConfigError(
      "unknown model variant '" + name +
      "' (expected effective, full, eff_single, eff_two_photon, "
      "eff_two_vacuum or full_rotating)");
}

ExperimentConfig load_config_json(const nlohmann::json& doc) {
  check_keys(doc, "",
             {"squid", "grid", "cavity", "coupling", "drive", "model",
              "experiment", "sweep", "stark", "transfer", "feasibility",
              "output", "seed"});

  ExperimentConfig cfg;
  cfg.doc = doc;

  if (doc.contains("squid")) {
    const json& s = doc.at("squid");
    check_keys(s, "/squid", {"C_fF", "L_pH", "Ic_uA", "Phix_Phi0"});
    if (s.contains("C_fF")) {
      cfg.squid.capacitance =
          get_number(s.at("C_fF"), "/squid/C_fF") * constants::femtofarad;
    }
    if (s.contains("L_pH")) {
      cfg.squid.inductance =
          get_number(s.at("L_pH"), "/squid/L_pH") * constants::picohenry;
    }
    if (s.contains("Ic_uA")) {
      cfg.squid.critical_current =
          get_number(s.at("Ic_uA"), "/squid/Ic_uA") * constants::microampere;
    }
    if (s.contains("Phix_Phi0")) {
      cfg.squid.phix_ratio = get_number(s.at("Phix_Phi0"), "/squid/Phix_Phi0");
    }
  }
  cfg.squid.validate();

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    check_keys(g, "/grid", {"points", "halfwidth_Phi0", "level_a_index"});
    if (g.contains("points")) {
      cfg.grid.num_points = get_integer(g.at("points"), "/grid/points");
    }
    if (g.contains("halfwidth_Phi0")) {
      cfg.grid.halfwidth_phi0 =
          get_number(g.at("halfwidth_Phi0"), "/grid/halfwidth_Phi0");
    }
    if (g.contains("level_a_index")) {
      cfg.grid.level_a_index =
          get_integer(g.at("level_a_index"), "/grid/level_a_index");
    }
    if (cfg.grid.num_points < 16 || cfg.grid.num_points % 2 != 0) {
      fail("/grid/points", "needs an even grid of at least 16 points");
    }
    if (!(cfg.grid.halfwidth_phi0 > 0.0)) {
      fail("/grid/halfwidth_Phi0", "must be positive");
    }
    if (cfg.grid.level_a_index < 1) {
      fail("/grid/level_a_index", "must be at least 1");
    }
  }

  if (doc.contains("cavity")) {
    const json& c = doc.at("cavity");
    check_keys(c, "/cavity",
               {"omega_c_GHz", "g_per_s", "Delta_c_per_s", "n_max", "Q"});
    if (c.contains("omega_c_GHz")) {
      const double f = get_number(c.at("omega_c_GHz"), "/cavity/omega_c_GHz");
      if (!(f > 0.0)) fail("/cavity/omega_c_GHz", "must be positive");
      cfg.omega_c = constants::ghz_to_rad_per_s(f);
    }
    maybe(c, "/cavity", "g_per_s", cfg.g_direct, get_number);
    maybe(c, "/cavity", "Delta_c_per_s", cfg.delta_c_direct, get_number);
    if (c.contains("n_max")) {
      cfg.n_max = get_integer(c.at("n_max"), "/cavity/n_max");
      if (cfg.n_max < 0) fail("/cavity/n_max", "must be non-negative");
    }
    if (c.contains("Q")) {
      const double q = get_number(c.at("Q"), "/cavity/Q");
      if (!(q > 0.0)) fail("/cavity/Q", "must be positive");
      cfg.quality = q;
    }
  }

  if (doc.contains("coupling")) {
    const json& c = doc.at("coupling");
    check_keys(c, "/coupling", {"Bc_integral_Tm2", "Buw_integral_Tm2"});
    maybe(c, "/coupling", "Bc_integral_Tm2", cfg.bc_integral, get_number);
    maybe(c, "/coupling", "Buw_integral_Tm2", cfg.buw_integral, get_number);
  }
  if (cfg.g_direct && cfg.bc_integral) {
    fail("/cavity/g_per_s",
         "conflicts with /coupling/Bc_integral_Tm2: both parametrize the "
         "cavity coupling");
  }

  if (doc.contains("drive")) {
    const json& arr = doc.at("drive");
    if (!arr.is_array()) fail("/drive", "expected an array of drive objects");
    if (arr.size() > 3) fail("/drive", "at most three drives are supported");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string ptr = "/drive/" + std::to_string(i);
      const json& d = arr.at(i);
      check_keys(d, ptr, {"Omega_per_s", "omega_uw_GHz", "Delta_uw_per_s"});
      conflict_if_both(d, ptr, "omega_uw_GHz", "Delta_uw_per_s");
      DriveConfig dc;
      maybe(d, ptr, "Omega_per_s", dc.omega_rabi, get_number);
      if (d.contains("omega_uw_GHz")) {
        const double f = get_number(d.at("omega_uw_GHz"), ptr + "/omega_uw_GHz");
        if (!(f > 0.0)) fail(ptr + "/omega_uw_GHz", "must be positive");
        dc.omega_uw = constants::ghz_to_rad_per_s(f);
      }
      maybe(d, ptr, "Delta_uw_per_s", dc.delta_uw, get_number);
      if (dc.omega_rabi && !(*dc.omega_rabi >= 0.0)) {
        fail(ptr + "/Omega_per_s", "must be non-negative");
      }
      cfg.drives.push_back(dc);
    }
  }

  if (doc.contains("model")) {
    const json& m = doc.at("model");
    check_keys(m, "/model", {"variant", "detuning_ratio"});
    if (m.contains("variant")) {
      cfg.variant = parse_variant(get_string(m.at("variant"), "/model/variant"));
    }
    if (m.contains("detuning_ratio")) {
      const double r =
          get_number(m.at("detuning_ratio"), "/model/detuning_ratio");
      if (!(r > 0.0)) fail("/model/detuning_ratio", "must be positive");
      cfg.detuning_ratio = r;
    }
  }
  if (cfg.detuning_ratio) {
    if (cfg.delta_c_direct) {
      fail("/model/detuning_ratio",
           "conflicts with /cavity/Delta_c_per_s: both set the cavity "
           "detuning");
    }
    for (std::size_t i = 0; i < cfg.drives.size(); ++i) {
      if (cfg.drives[i].delta_uw || cfg.drives[i].omega_uw) {
        fail("/model/detuning_ratio",
             "conflicts with /drive/" + std::to_string(i) +
                 ": both set the drive detuning");
      }
    }
  }

  if (doc.contains("experiment")) {
    cfg.experiment = get_string(doc.at("experiment"), "/experiment");
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    check_keys(s, "/sweep", {"parameter", "values", "min", "max", "steps"});
    SweepDescriptor sd;
    if (!s.contains("parameter")) fail("/sweep", "missing 'parameter'");
    sd.parameter = get_string(s.at("parameter"), "/sweep/parameter");
    if (sd.parameter.empty() || sd.parameter.front() != '/') {
      fail("/sweep/parameter", "must be a JSON pointer starting with '/'");
    }
    if (s.contains("values")) {
      if (s.contains("min") || s.contains("max") || s.contains("steps")) {
        fail("/sweep", "give either an explicit 'values' list or a range");
      }
      const json& vals = s.at("values");
      if (!vals.is_array()) fail("/sweep/values", "expected an array");
      for (std::size_t i = 0; i < vals.size(); ++i) {
        sd.values.push_back(
            get_number(vals.at(i), "/sweep/values/" + std::to_string(i)));
      }
    } else {
      if (!s.contains("min") || !s.contains("max") || !s.contains("steps")) {
        fail("/sweep", "range sweeps need 'min', 'max' and 'steps'");
      }
      const double lo = get_number(s.at("min"), "/sweep/min");
      const double hi = get_number(s.at("max"), "/sweep/max");
      const int n = get_integer(s.at("steps"), "/sweep/steps");
      if (n < 1) fail("/sweep/steps", "must be at least 1");
      for (int k = 0; k < n; ++k) {
        sd.values.push_back(
            n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (n - 1));
      }
    }
    cfg.sweep = std::move(sd);
  }

  if (doc.contains("stark")) {
    const json& s = doc.at("stark");
    check_keys(s, "/stark", {"theta_min", "theta_max", "steps", "amplitudes"});
    if (s.contains("theta_min")) {
      cfg.stark.theta_min = get_number(s.at("theta_min"), "/stark/theta_min");
    }
    if (s.contains("theta_max")) {
      cfg.stark.theta_max = get_number(s.at("theta_max"), "/stark/theta_max");
    }
    if (s.contains("steps")) {
      cfg.stark.steps = get_integer(s.at("steps"), "/stark/steps");
      if (cfg.stark.steps < 2) fail("/stark/steps", "must be at least 2");
    }
    if (s.contains("amplitudes")) {
      const json& a = s.at("amplitudes");
      if (!a.is_array() || a.size() != 8) {
        fail("/stark/amplitudes",
             "expected 8 numbers (re,im for each of the four amplitudes)");
      }
      std::array<double, 8> amps{};
      for (std::size_t i = 0; i < 8; ++i) {
        amps[i] = get_number(a.at(i), "/stark/amplitudes/" + std::to_string(i));
      }
      cfg.stark.amplitudes = amps;
    }
  }

  if (doc.contains("transfer")) {
    const json& t = doc.at("transfer");
    check_keys(t, "/transfer", {"alpha_re", "alpha_im", "beta_re", "beta_im"});
    const bool any = t.contains("alpha_re") || t.contains("alpha_im") ||
                     t.contains("beta_re") || t.contains("beta_im");
    if (any) {
      auto part = [&](const char* key) {
        return t.contains(key)
                   ? get_number(t.at(key), std::string("/transfer/") + key)
                   : 0.0;
      };
      cfg.transfer.alpha = cplx(part("alpha_re"), part("alpha_im"));
      cfg.transfer.beta = cplx(part("beta_re"), part("beta_im"));
    }
  }

  if (doc.contains("feasibility")) {
    const json& f = doc.at("feasibility");
    check_keys(f, "/feasibility",
               {"R_ohm", "T1_s", "P_a", "P_c", "g_eff_alt_per_s"});
    maybe(f, "/feasibility", "R_ohm", cfg.feasibility.resistance, get_number);
    maybe(f, "/feasibility", "T1_s", cfg.feasibility.t1, get_number);
    maybe(f, "/feasibility", "P_a", cfg.feasibility.p_a, get_number);
    maybe(f, "/feasibility", "P_c", cfg.feasibility.p_c, get_number);
    maybe(f, "/feasibility", "g_eff_alt_per_s", cfg.feasibility.g_eff_alt,
          get_number);
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    check_keys(o, "/output", {"dir"});
    if (o.contains("dir")) cfg.out_dir = get_string(o.at("dir"), "/output/dir");
  }

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    // Text-parsed non-negative integers arrive as unsigned; programmatically
    // assigned ones may be signed. Accept both, reject negatives.
    if (!s.is_number_integer() ||
        (!s.is_number_unsigned() && s.get<long long>() < 0)) {
      fail("/seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }

  return cfg;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError("config is not valid JSON: " + std::string(err.what()));
  }
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  return load_config_json(read_json_file(path));
}

std::string config_hash_hex(const nlohmann::json& doc) {
  nlohmann::json hashed = doc;
  if (hashed.is_object()) hashed.erase("output");
  const std::string canon = hashed.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace squidcav
