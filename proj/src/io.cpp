#include "rephase/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "rephase/errors.hpp"

namespace rephase::io {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& value) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw IoError("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_trajectory(std::ostream& out, const ContrastCurve& curve) {
  out << kTrajectoryHeader << '\n';
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const SpinVector& s = curve.sbar[k];
    out << format_double(curve.times[k]) << ',' << format_double(s.perp1) << ',' << format_double(s.perp2) << ','
        << format_double(s.par) << ',' << format_double(curve.contrast[k]) << ','
        << format_double(curve.contrast_total[k]) << '\n';
  }
}

void write_trajectory(const std::filesystem::path& path, const ContrastCurve& curve) {
  std::ostringstream text;
  write_trajectory(text, curve);
  write_text(path, text.str());
}

void write_grid(std::ostream& out, const EnergyGrid& grid) {
  out << "index,node,weight\n";
  const auto e = grid.nodes();
  const auto w = grid.weights();
  for (std::size_t i = 0; i < grid.size(); ++i)
    out << i << ',' << format_double(e[i]) << ',' << format_double(w[i]) << '\n';
}

Series read_series(std::istream& in, const std::string& source) {
  Series s;
  std::string line;
  if (!std::getline(in, line)) throw IoError(source + ": empty input (expected a header line)");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    double x = 0.0, y = 0.0;
    if (fields.size() != 2)
      throw IoError(source + ":" + std::to_string(line_no) + ": expected 2 columns, got " +
                    std::to_string(fields.size()));
    if (!parse_double(fields[0], x) || !parse_double(fields[1], y))
      throw IoError(source + ":" + std::to_string(line_no) + ": not a number");
    s.x.push_back(x);
    s.y.push_back(y);
  }
  return s;
}

Series read_series(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_series(in, path.string());
}

ContrastCurve read_trajectory(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTrajectoryHeader)
    throw IoError(path.string() + ":1: not a trajectory file");
  ContrastCurve curve;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    double v[6];
    if (fields.size() != 6) throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 6 columns");
    for (int i = 0; i < 6; ++i)
      if (!parse_double(fields[i], v[i]))
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": not a number");
    curve.times.push_back(v[0]);
    curve.sbar.push_back({v[1], v[2], v[3]});
    curve.contrast.push_back(v[4]);
    curve.contrast_total.push_back(v[5]);
  }
  return curve;
}

std::vector<double> read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (width == 0) width = fields.size();
    if (fields.size() != width) throw IoError(path.string() + ":" + std::to_string(line_no) + ": ragged row");
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) throw IoError(path.string() + ":" + std::to_string(line_no) + ": not a number");
      values.push_back(v);
    }
  }
  if (values.empty()) throw IoError(path.string() + ": empty matrix");
  return values;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace rephase::io
