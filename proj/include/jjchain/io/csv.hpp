#pragma once

// CSV formats for measurement inputs and tabular outputs. Numbers are
// written with 17 significant digits so a write/read cycle is lossless.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "jjchain/error.hpp"
#include "jjchain/extraction/dc.hpp"
#include "jjchain/extraction/s11.hpp"
#include "jjchain/peaks.hpp"

namespace jjchain::io {

inline constexpr std::string_view two_tone_header = "pump_freq_hz,response,unit";
inline constexpr std::string_view s11_header = "freq_hz,s11_re,s11_im";
inline constexpr std::string_view resistance_header = "stack_count,resistance_ohm";
inline constexpr std::string_view peaks_header = "peak_freq_hz,prominence";

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] inline void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + what);
}

inline double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    parse_fail(line_no, "invalid number '" + std::string(s) + "'");
  }
  return v;
}

inline int parse_int(std::string_view s, std::size_t line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    parse_fail(line_no, "invalid integer '" + std::string(s) + "'");
  }
  return v;
}

// Data rows (header checked and removed), each split into `columns` fields.
inline std::vector<std::pair<std::size_t, std::vector<std::string_view>>> rows(
    std::string_view text, std::string_view header, std::size_t columns) {
  std::vector<std::pair<std::size_t, std::vector<std::string_view>>> out;
  std::size_t line_no = 0;
  bool seen_header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = trim(text.substr(pos, nl == text.npos ? text.npos : nl - pos));
    pos = nl == text.npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!seen_header) {
      auto fields = split(line);
      std::string joined;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) joined += ',';
        joined += fields[i];
      }
      if (joined != header) parse_fail(line_no, "expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    auto fields = split(line);
    if (fields.size() != columns) {
      parse_fail(line_no, "expected " + std::to_string(columns) + " columns");
    }
    out.emplace_back(line_no, std::move(fields));
  }
  if (!seen_header) parse_fail(line_no, "missing header '" + std::string(header) + "'");
  return out;
}

}  // namespace detail

inline TwoToneTrace parse_two_tone_csv(std::string_view text) {
  std::vector<double> f;
  std::vector<double> y;
  std::optional<ResponseUnit> unit;
  for (const auto& [line_no, fields] : detail::rows(text, two_tone_header, 3)) {
    f.push_back(detail::parse_double(fields[0], line_no));
    y.push_back(detail::parse_double(fields[1], line_no));
    ResponseUnit u{};
    if (fields[2] == "linear") {
      u = ResponseUnit::linear;
    } else if (fields[2] == "db") {
      u = ResponseUnit::db;
    } else {
      detail::parse_fail(line_no, "unit must be 'linear' or 'db'");
    }
    if (unit && *unit != u) detail::parse_fail(line_no, "mixed units in one trace");
    unit = u;
  }
  if (!unit) throw Error(ErrorKind::Parse, "two-tone file has no data rows");
  return TwoToneTrace(std::move(f), std::move(y), *unit);
}

inline std::string write_two_tone_csv(const TwoToneTrace& trace) {
  std::string out(two_tone_header);
  out += '\n';
  for (std::size_t k = 0; k < trace.pump_frequency().size(); ++k) {
    out += format_double(trace.pump_frequency()[k]) + ',' + format_double(trace.response()[k]) +
           ',' + to_string(trace.unit()) + '\n';
  }
  return out;
}

inline std::vector<S11Point> parse_s11_csv(std::string_view text) {
  std::vector<S11Point> out;
  for (const auto& [line_no, fields] : detail::rows(text, s11_header, 3)) {
    out.push_back({detail::parse_double(fields[0], line_no),
                   Complex(detail::parse_double(fields[1], line_no),
                           detail::parse_double(fields[2], line_no))});
  }
  return out;
}

inline std::string write_s11_csv(const std::vector<S11Point>& trace) {
  std::string out(s11_header);
  out += '\n';
  for (const auto& p : trace) {
    out += format_double(p.frequency) + ',' + format_double(p.s11.real()) + ',' +
           format_double(p.s11.imag()) + '\n';
  }
  return out;
}

inline std::vector<DcPoint> parse_resistance_csv(std::string_view text) {
  std::vector<DcPoint> out;
  for (const auto& [line_no, fields] : detail::rows(text, resistance_header, 2)) {
    out.push_back({detail::parse_int(fields[0], line_no), detail::parse_double(fields[1], line_no)});
  }
  return out;
}

inline std::string write_resistance_csv(const std::vector<DcPoint>& points) {
  std::string out(resistance_header);
  out += '\n';
  for (const auto& p : points) {
    out += std::to_string(p.stack_count) + ',' + format_double(p.resistance) + '\n';
  }
  return out;
}

inline PeakList parse_peaks_csv(std::string_view text) {
  PeakList out;
  for (const auto& [line_no, fields] : detail::rows(text, peaks_header, 2)) {
    out.peak_frequencies.push_back(detail::parse_double(fields[0], line_no));
    out.prominences.push_back(detail::parse_double(fields[1], line_no));
  }
  return out;
}

inline std::string write_peaks_csv(const PeakList& peaks) {
  std::string out(peaks_header);
  out += '\n';
  for (std::size_t k = 0; k < peaks.peak_frequencies.size(); ++k) {
    out += format_double(peaks.peak_frequencies[k]) + ',' + format_double(peaks.prominences[k]) + '\n';
  }
  return out;
}

}  // namespace jjchain::io
