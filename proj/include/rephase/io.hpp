#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rephase/energy_grid.hpp"
#include "rephase/kinetic.hpp"

namespace rephase::io {

/// Shortest round-trip form would differ across libcs; always 17 significant digits.
std::string format_double(double v);

inline constexpr const char* kTrajectoryHeader = "t,sbar_perp1,sbar_perp2,sbar_par,contrast,contrast_total";

void write_trajectory(std::ostream& out, const ContrastCurve& curve);
void write_trajectory(const std::filesystem::path& path, const ContrastCurve& curve);

/// index,node,weight
void write_grid(std::ostream& out, const EnergyGrid& grid);

/// Two-column numeric data `t_or_detuning,value` after a one-line header.
struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

/// Throws IoError on unreadable files and on malformed rows (with the line number).
Series read_series(std::istream& in, const std::string& source = "<stream>");
Series read_series(const std::filesystem::path& path);

/// Reads a trajectory CSV back (header as written by write_trajectory).
ContrastCurve read_trajectory(const std::filesystem::path& path);

/// Dense square matrix, comma separated, no header.
std::vector<double> read_matrix(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rephase::io
