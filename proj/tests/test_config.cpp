#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "squidcav/config.hpp"
#include "squidcav/constants.hpp"
#include "squidcav/errors.hpp"
#include "squidcav/io.hpp"

namespace {

using nlohmann::json;

json minimal_bell_doc() {
  return json::parse(R"({
    "experiment": "bell",
    "cavity": {"g_per_s": 1.8e8},
    "drive": [{"Omega_per_s": 1.5e8, "Delta_uw_per_s": 1.5e9}],
    "model": {"variant": "effective"}
  })");
}

json full_bell_doc() {
  auto doc = minimal_bell_doc();
  doc["cavity"]["Delta_c_per_s"] = 1.8e9;
  return doc;
}

std::string thrown_message(const json& doc) {
  try {
    (void)squidcav::load_config_json(doc);
  } catch (const squidcav::ConfigError& err) {
    return err.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("a minimal document loads with defaults") {
  auto doc = full_bell_doc();
  const auto cfg = squidcav::load_config_json(doc);
  CHECK(cfg.experiment == "bell");
  CHECK(cfg.variant == squidcav::Variant::eff_two_vacuum);
  CHECK(cfg.n_max == 5);
  CHECK(cfg.seed == 1);
  CHECK(cfg.out_dir == ".");
  CHECK(cfg.grid.num_points == 512);
  CHECK(cfg.squid.capacitance == doctest::Approx(90e-15));
  REQUIRE(cfg.drives.size() == 1);
  CHECK(cfg.drives[0].omega_rabi.value() == 1.5e8);
  CHECK(cfg.drives[0].delta_uw.value() == 1.5e9);
  CHECK(cfg.g_direct.value() == 1.8e8);
  CHECK(cfg.delta_c_direct.value() == 1.8e9);
}

TEST_CASE("unit conversions follow the key suffixes") {
  auto doc = full_bell_doc();
  doc["squid"] = {{"C_fF", 90.0},
                  {"L_pH", 100.0},
                  {"Ic_uA", 3.75},
                  {"Phix_Phi0", 0.4995}};
  doc["cavity"]["omega_c_GHz"] = 29.7;
  doc["cavity"].erase("Delta_c_per_s");
  const auto cfg = squidcav::load_config_json(doc);
  CHECK(cfg.squid.capacitance == doctest::Approx(90.0e-15).epsilon(1e-15));
  CHECK(cfg.squid.inductance == doctest::Approx(100.0e-12).epsilon(1e-15));
  CHECK(cfg.squid.critical_current == doctest::Approx(3.75e-6).epsilon(1e-15));
  CHECK(cfg.omega_c.value() ==
        doctest::Approx(2.0 * squidcav::constants::pi * 29.7e9).epsilon(1e-15));
}

TEST_CASE("unknown keys are rejected with their JSON-pointer path") {
  auto doc = full_bell_doc();
  doc["cavity"]["frequency"] = 3.0;
  std::string msg = thrown_message(doc);
  CHECK(msg.find("/cavity/frequency") != std::string::npos);

  doc = full_bell_doc();
  doc["typo_section"] = json::object();
  msg = thrown_message(doc);
  CHECK(msg.find("/typo_section") != std::string::npos);

  doc = full_bell_doc();
  doc["drive"][0]["omega"] = 1.0;
  msg = thrown_message(doc);
  CHECK(msg.find("omega") != std::string::npos);
  CHECK(msg.find("/drive") != std::string::npos);
}

TEST_CASE("type errors carry the offending path") {
  auto doc = full_bell_doc();
  doc["cavity"]["g_per_s"] = "fast";
  const std::string msg = thrown_message(doc);
  CHECK(!msg.empty());
  CHECK(msg.find("/cavity/g_per_s") != std::string::npos);
}

TEST_CASE("conflicting parametrizations are rejected") {
  // g given both directly and through the field integral.
  auto doc = full_bell_doc();
  doc["cavity"]["Bc_integral_Tm2"] = 1e-12;
  CHECK_THROWS_AS((void)squidcav::load_config_json(doc), squidcav::ConfigError);

  // Drive frequency given both absolutely and as a detuning.
  doc = full_bell_doc();
  doc["drive"][0]["omega_uw_GHz"] = 22.0;
  CHECK_THROWS_AS((void)squidcav::load_config_json(doc), squidcav::ConfigError);

  // detuning_ratio conflicts with any direct detuning.
  doc = full_bell_doc();
  doc["model"]["detuning_ratio"] = 10.0;
  CHECK_THROWS_AS((void)squidcav::load_config_json(doc), squidcav::ConfigError);

  doc = minimal_bell_doc();
  doc["model"]["detuning_ratio"] = 10.0;  // against the drive detuning
  CHECK_THROWS_AS((void)squidcav::load_config_json(doc), squidcav::ConfigError);

  // Without the drive detuning the ratio is a valid single knob.
  doc = minimal_bell_doc();
  doc["drive"][0].erase("Delta_uw_per_s");
  doc["model"]["detuning_ratio"] = 10.0;
  const auto cfg = squidcav::load_config_json(doc);
  CHECK(cfg.detuning_ratio.value() == 10.0);
}

TEST_CASE("grid constraints are enforced at load time") {
  auto doc = full_bell_doc();
  doc["grid"] = {{"points", 10}};  // below the loader's floor
  CHECK_THROWS_AS((void)squidcav::load_config_json(doc), squidcav::ConfigError);
  doc["grid"] = {{"points", 129}};  // odd
  CHECK_THROWS_AS((void)squidcav::load_config_json(doc), squidcav::ConfigError);
  doc["grid"] = {{"points", 256}, {"level_a_index", 3}};
  CHECK(squidcav::load_config_json(doc).grid.num_points == 256);
}

TEST_CASE("drive list size is bounded") {
  auto doc = full_bell_doc();
  doc["drive"] = json::array();
  for (int k = 0; k < 4; ++k)
    doc["drive"].push_back({{"Omega_per_s", 1.5e8}, {"Delta_uw_per_s", 1.5e9}});
  CHECK_THROWS_AS((void)squidcav::load_config_json(doc), squidcav::ConfigError);
}

TEST_CASE("sweep accepts explicit values or a linspace, not both") {
  auto doc = full_bell_doc();
  doc["sweep"] = {{"parameter", "/model/detuning_ratio"},
                  {"values", {20.0, 10.0, 5.0}}};
  auto cfg = squidcav::load_config_json(doc);
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->values == std::vector<double>{20.0, 10.0, 5.0});

  doc["sweep"] = {{"parameter", "/model/detuning_ratio"},
                  {"min", 5.0},
                  {"max", 20.0},
                  {"steps", 4}};
  cfg = squidcav::load_config_json(doc);
  REQUIRE(cfg.sweep.has_value());
  REQUIRE(cfg.sweep->values.size() == 4);
  CHECK(cfg.sweep->values.front() == doctest::Approx(5.0));
  CHECK(cfg.sweep->values.back() == doctest::Approx(20.0));

  doc["sweep"] = {{"parameter", "/model/detuning_ratio"},
                  {"values", {1.0}},
                  {"min", 5.0},
                  {"max", 20.0},
                  {"steps", 4}};
  CHECK_THROWS_AS((void)squidcav::load_config_json(doc), squidcav::ConfigError);

  // The parameter must be a JSON pointer.
  doc["sweep"] = {{"parameter", "model.detuning_ratio"}, {"values", {1.0}}};
  CHECK_THROWS_AS((void)squidcav::load_config_json(doc), squidcav::ConfigError);
}

TEST_CASE("config hash ignores output location but nothing else") {
  const auto doc = full_bell_doc();
  const std::string base = squidcav::config_hash_hex(doc);
  CHECK(base.size() == 16);

  // Pure re-serialization does not move the hash.
  CHECK(squidcav::config_hash_hex(json::parse(doc.dump())) == base);

  // The output directory is not semantic.
  auto moved = doc;
  moved["output"] = {{"dir", "elsewhere"}};
  CHECK(squidcav::config_hash_hex(moved) == base);

  // Any physical field is.
  auto physical = doc;
  physical["cavity"]["g_per_s"] = 1.9e8;
  CHECK(squidcav::config_hash_hex(physical) != base);

  auto seeded = doc;
  seeded["seed"] = 7;
  CHECK(squidcav::config_hash_hex(seeded) != base);
}

TEST_CASE("variant parsing accepts shorthands and exact names") {
  using squidcav::Variant;
  CHECK(squidcav::parse_variant("effective") == Variant::eff_two_vacuum);
  CHECK(squidcav::parse_variant("full") == Variant::full_rotating);
  CHECK(squidcav::parse_variant("eff_single") == Variant::eff_single);
  CHECK(squidcav::parse_variant("eff_two_photon") == Variant::eff_two_photon);
  CHECK(squidcav::parse_variant("eff_two_vacuum") == Variant::eff_two_vacuum);
  CHECK(squidcav::parse_variant("full_rotating") == Variant::full_rotating);
  CHECK_THROWS_AS((void)squidcav::parse_variant("quantum"),
                  squidcav::ConfigError);
}

TEST_CASE("17 significant digits round-trip doubles exactly") {
  const double values[] = {0.97023409093074064,
                           -1.40925e7,
                           squidcav::constants::pi,
                           1.0 / 3.0,
                           6.62607015e-34,
                           -0.0,
                           1.6666666666666667e-05};
  for (const double v : values) {
    const std::string s = squidcav::io::format_sig17(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
}

TEST_CASE("csv writer enforces its column count") {
  squidcav::io::CsvWriter w({"a", "b", "c"});
  w.add_row({"1", "2", "3"});
  CHECK(w.str() == "a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(w.add_row({"1", "2"}), squidcav::ConfigError);
}

TEST_CASE("atomic write replaces content and leaves no temporaries") {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / "squidcav_test_atomic_write";
  fs::remove_all(dir);
  const fs::path target = dir / "nested" / "file.txt";

  squidcav::io::atomic_write(target, "first\n");
  squidcav::io::atomic_write(target, "second\n");

  std::ifstream in(target);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second\n");

  int entries = 0;
  for (const auto& e : fs::directory_iterator(target.parent_path())) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);  // no stray .tmp files
  fs::remove_all(dir);
}

TEST_CASE("trajectory csv column layout") {
  squidcav::Trajectory traj;
  traj.times = {0.0, 1.0e-7};
  squidcav::SampleObservables o1;
  o1.pop_joint = {1.0, 0.0, 0.0, 0.0};
  squidcav::SampleObservables o2;
  o2.pop_joint = {0.0, 0.5, 0.5, 0.0};
  o2.pop_a_total = 0.01;
  o2.n_photon = 0.002;
  traj.observables = {o1, o2};

  const std::string with_cavity =
      squidcav::io::trajectory_csv(traj, {0.5, 1.0}, true);
  CHECK(with_cavity.find("t_s,pop_00,pop_01,pop_10,pop_11,pop_a_total,"
                         "n_photon,fidelity_vs_target\n") == 0);

  const std::string bare = squidcav::io::trajectory_csv(traj, {}, false);
  CHECK(bare.find("t_s,pop_00,pop_01,pop_10,pop_11\n") == 0);

  // Mismatched fidelity column length is a hard error.
  CHECK_THROWS_AS((void)squidcav::io::trajectory_csv(traj, {0.5}, false),
                  squidcav::ConfigError);
}

TEST_CASE("config files load from disk with parse errors wrapped") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "squidcav_test_config_io";
  fs::create_directories(dir);

  const fs::path good = dir / "good.json";
  squidcav::io::atomic_write(good, full_bell_doc().dump(2));
  const auto cfg = squidcav::load_config_file(good);
  CHECK(cfg.experiment == "bell");

  const fs::path bad = dir / "bad.json";
  squidcav::io::atomic_write(bad, "{not json");
  CHECK_THROWS_AS((void)squidcav::load_config_file(bad),
                  squidcav::ConfigError);

  CHECK_THROWS_AS((void)squidcav::load_config_file(dir / "missing.json"),
                  squidcav::ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("error hierarchy maps to exit codes") {
  const squidcav::ConfigError config_err("c");
  const squidcav::VerificationError verify_err("v");
  const squidcav::NumericError numeric_err("n");
  CHECK(config_err.exit_code() == 2);
  CHECK(verify_err.exit_code() == 3);
  CHECK(numeric_err.exit_code() == 4);
  CHECK(config_err.category() == squidcav::ErrorCategory::config);
  CHECK(verify_err.category() == squidcav::ErrorCategory::verification);
  CHECK(numeric_err.category() == squidcav::ErrorCategory::numeric);
}

}  // TEST_SUITE
