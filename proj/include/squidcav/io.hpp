#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "squidcav/dynamics.hpp"

namespace squidcav::io {

/// Decimal floating point with 17 significant digits: round-trips any
/// double exactly and is byte-stable across runs.
[[nodiscard]] std::string format_sig17(double value);

/// Minimal CSV assembly with a fixed column count per writer.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  [[nodiscard]] const std::string& str() const { return buffer_; }

 private:
  std::size_t columns_;
  std::string buffer_;
};

/// Write `content` to `path` atomically: a temp file in the same directory
/// is written, flushed, then renamed over the target, so an interrupted run
/// never leaves a partial file at the destination.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Trajectory CSV with the pinned column set
///   t_s,pop_00,pop_01,pop_10,pop_11,pop_a_total,n_photon,fidelity_vs_target
/// The pop_a_total/n_photon pair is present only when `include_cavity` is
/// set (models that carry |a> levels or a cavity mode); the fidelity column
/// only when `fidelity_vs_target` is non-empty (then its size must match).
[[nodiscard]] std::string trajectory_csv(
    const Trajectory& traj, const std::vector<double>& fidelity_vs_target,
    bool include_cavity);

}  // namespace squidcav::io
