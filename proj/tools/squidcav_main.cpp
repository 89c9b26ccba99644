#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

#include "squidcav/experiments.hpp"
#include "squidcav/io.hpp"
#include "squidcav/version.hpp"

namespace {

bool log_enabled() {
  const char* v = std::getenv("SQUIDCAV_LOG");
  return !(v && std::string(v) == "quiet");
}

struct CommonOpts {
  CLI::Option* config = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* model = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* experiment = nullptr;
};

void print_scalar_line(const std::string& key, const nlohmann::json& value) {
  std::cout << "  " << std::left << std::setw(26) << key << " ";
  if (value.is_number()) {
    std::cout << squidcav::io::format_sig17(value.get<double>());
  } else {
    std::cout << value.dump();
  }
  std::cout << "\n";
}

void print_feasibility_table(const nlohmann::json& payload) {
  std::cout << "feasibility report\n";
  for (const auto& [key, value] : payload.items()) {
    if (value.is_object()) continue;
    print_scalar_line(key, value);
  }
  for (const char* section : {"formula", "alt"}) {
    if (!payload.contains(section)) continue;
    std::cout << "  [" << section << " g_eff reading]\n";
    for (const auto& [key, value] : payload.at(section).items()) {
      print_scalar_line("  " + key, value);
    }
  }
}

void print_summary(const squidcav::ResultRecord& rec) {
  for (const std::string& w : rec.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (!log_enabled()) return;
  std::cout << "experiment " << rec.experiment << " (model "
            << rec.model_variant << ", config " << rec.config_hash << ")\n";
  for (const char* key :
       {"fidelity", "distance", "peak_pop_a", "peak_n_photon", "max_abs_diff",
        "omega_a0_over_2pi_GHz", "t_total_s"}) {
    if (rec.payload.contains(key) && rec.payload.at(key).is_number()) {
      print_scalar_line(key, rec.payload.at(key));
    }
  }
  if (rec.experiment == "feasibility") print_feasibility_table(rec.payload);
  std::cout << "  duration " << rec.duration_s << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rf-SQUID cavity QED experiment runner"};
  app.set_version_flag("--version", squidcav::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string model;
  std::string experiment;
  std::uint64_t seed = 0;

  const auto add_common = [&](CLI::App* sub, bool with_experiment) {
    CommonOpts opts;
    opts.config = sub->add_option("--config", config_path, "JSON config file")
                      ->required();
    opts.out = sub->add_option("--out", out_dir, "output directory");
    opts.model = sub->add_option(
        "--model", model, "model variant (effective|full|eff_single|...)");
    opts.seed = sub->add_option("--seed", seed, "seed for randomized inputs");
    if (with_experiment) {
      opts.experiment = sub->add_option(
          "--experiment", experiment,
          "experiment name (bell|transfer|cnot|swap|stark-sweep)");
    }
    return opts;
  };

  CLI::App* sub_spectrum =
      app.add_subcommand("spectrum", "solve the SQUID level structure");
  CLI::App* sub_run = app.add_subcommand("run", "run a named experiment");
  CLI::App* sub_sweep =
      app.add_subcommand("sweep", "run the experiment over a parameter sweep");
  CLI::App* sub_feas =
      app.add_subcommand("feasibility", "timescale feasibility arithmetic");

  const CommonOpts opts_spectrum = add_common(sub_spectrum, false);
  const CommonOpts opts_run = add_common(sub_run, true);
  const CommonOpts opts_sweep = add_common(sub_sweep, true);
  const CommonOpts opts_feas = add_common(sub_feas, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    const CommonOpts& opts = active == sub_spectrum ? opts_spectrum
                             : active == sub_run    ? opts_run
                             : active == sub_sweep  ? opts_sweep
                                                    : opts_feas;

    nlohmann::json doc = squidcav::read_json_file(config_path);
    if (!doc.is_object()) {
      throw squidcav::ConfigError("config root must be a JSON object");
    }
    if (active == sub_spectrum) doc["experiment"] = "spectrum";
    if (active == sub_feas) doc["experiment"] = "feasibility";
    if (opts.experiment && opts.experiment->count() > 0) {
      doc["experiment"] = experiment;
    }
    if (opts.model->count() > 0) doc["model"]["variant"] = model;
    if (opts.seed->count() > 0) doc["seed"] = seed;
    if (opts.out->count() > 0) doc["output"]["dir"] = out_dir;

    const squidcav::ExperimentConfig cfg = squidcav::load_config_json(doc);

    if (active == sub_sweep) {
      if (!cfg.sweep) {
        throw squidcav::ConfigError(
            "the sweep subcommand needs a 'sweep' section in the config");
      }
      const std::vector<squidcav::ResultRecord> records =
          squidcav::sweep(cfg, cfg.sweep->parameter, cfg.sweep->values);
      const nlohmann::json report = squidcav::sweep_report_json(
          records, cfg.sweep->parameter, cfg.sweep->values);
      squidcav::io::atomic_write(
          std::filesystem::path(cfg.out_dir) / "sweep_report.json",
          report.dump(2) + "\n");
      if (log_enabled()) {
        for (std::size_t i = 0; i < records.size(); ++i) {
          const squidcav::ResultRecord& r = records[i];
          std::cout << "point " << i << " value "
                    << cfg.sweep->values[i] << ": "
                    << (r.failed ? "FAILED" : "ok");
          if (!r.failed && r.payload.contains("fidelity")) {
            std::cout << " fidelity "
                      << r.payload.at("fidelity").get<double>();
          }
          if (r.failed) {
            std::cout << " ("
                      << r.payload.at("error").at("message").get<std::string>()
                      << ")";
          }
          std::cout << "\n";
        }
        std::cout << records.size() << " sweep points -> "
                  << (std::filesystem::path(cfg.out_dir) / "sweep_report.json")
                         .string()
                  << "\n";
      }
      return 0;
    }

    const squidcav::ResultRecord rec = squidcav::run_experiment(cfg);
    print_summary(rec);
    return 0;
  } catch (const squidcav::Error& err) {
    std::cerr << "error (" << (err.exit_code() == 2   ? "config"
                               : err.exit_code() == 3 ? "verification"
                                                      : "numeric")
              << "): " << err.what() << "\n";
    return err.exit_code();
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
