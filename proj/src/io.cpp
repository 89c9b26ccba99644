#include "squidcav/io.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include "squidcav/errors.hpp"

namespace squidcav::io {

std::string format_sig17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header)
    : columns_(header.size()) {
  if (columns_ == 0) throw ConfigError("CSV needs at least one column");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw ConfigError("CSV row width does not match the header");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path dir =
      path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);  // best effort; open reports

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ConfigError("cannot open output file for writing: " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw ConfigError("failed writing output file: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("failed to move output into place: " + path.string() +
                      " (" + ec.message() + ")");
  }
}

std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<double>& fidelity_vs_target,
                           bool include_cavity) {
  const bool with_fid = !fidelity_vs_target.empty();
  if (with_fid && fidelity_vs_target.size() != traj.times.size()) {
    throw ConfigError("fidelity column length does not match the trajectory");
  }
  if (traj.observables.size() != traj.times.size()) {
    throw ConfigError("trajectory observables are incomplete");
  }

  std::vector<std::string> header = {"t_s", "pop_00", "pop_01", "pop_10",
                                     "pop_11"};
  if (include_cavity) {
    header.emplace_back("pop_a_total");
    header.emplace_back("n_photon");
  }
  if (with_fid) header.emplace_back("fidelity_vs_target");

  CsvWriter csv(header);
  std::vector<std::string> row;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    row.clear();
    const SampleObservables& obs = traj.observables[k];
    row.push_back(format_sig17(traj.times[k]));
    for (double p : obs.pop_joint) row.push_back(format_sig17(p));
    if (include_cavity) {
      row.push_back(format_sig17(obs.pop_a_total));
      row.push_back(format_sig17(obs.n_photon));
    }
    if (with_fid) row.push_back(format_sig17(fidelity_vs_target[k]));
    csv.add_row(row);
  }
  return csv.str();
}

}  // namespace squidcav::io
