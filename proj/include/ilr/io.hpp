#ifndef ILR_IO_HPP
#define ILR_IO_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "ilr/dataset.hpp"
#include "ilr/error.hpp"
#include "ilr/interval.hpp"

namespace ilr {

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_real(double v) {
  if (v == 0) v = 0.0;  // no "-0"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_real(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits on commas outside brackets and double quotes; quotes are stripped.
inline std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  int depth = 0;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
      continue;
    }
    if (!quoted) {
      if (ch == '[') ++depth;
      if (ch == ']') --depth;
      if (ch == ',' && depth == 0) {
        cells.emplace_back(trim(cur));
        cur.clear();
        continue;
      }
    }
    cur.push_back(ch);
  }
  cells.emplace_back(trim(cur));
  return cells;
}

}  // namespace detail

/// Parses "v", "[lo,hi]" or "lo..hi".
inline std::optional<Interval> parse_interval(std::string_view cell) {
  cell = detail::trim(cell);
  std::optional<double> lo, hi;
  if (cell.size() >= 2 && cell.front() == '[' && cell.back() == ']') {
    auto inner = cell.substr(1, cell.size() - 2);
    auto comma = inner.find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    lo = parse_real(inner.substr(0, comma));
    hi = parse_real(inner.substr(comma + 1));
  } else if (auto dots = cell.find(".."); dots != std::string_view::npos) {
    lo = parse_real(cell.substr(0, dots));
    hi = parse_real(cell.substr(dots + 2));
  } else {
    lo = parse_real(cell);
    hi = lo;
  }
  if (!lo || !hi || *lo > *hi) return std::nullopt;
  return Interval(*lo, *hi);
}

inline std::string format_interval(const Interval& iv) {
  if (iv.degenerate()) return format_real(iv.lo());
  return "[" + format_real(iv.lo()) + "," + format_real(iv.hi()) + "]";
}

inline std::optional<UncertainLabel> parse_label(std::string_view cell) {
  cell = detail::trim(cell);
  if (cell == "0") return UncertainLabel::known(0);
  if (cell == "1") return UncertainLabel::known(1);
  if (cell == "?") return UncertainLabel::unknown();
  if (cell.size() >= 2 && cell.front() == '[' && cell.back() == ']') {
    auto inner = cell.substr(1, cell.size() - 2);
    auto comma = inner.find(',');
    if (comma != std::string_view::npos && detail::trim(inner.substr(0, comma)) == "0" &&
        detail::trim(inner.substr(comma + 1)) == "1") {
      return UncertainLabel::unknown();
    }
  }
  return std::nullopt;
}

inline std::string format_label(const UncertainLabel& l) {
  return l.is_unknown() ? "?" : std::to_string(l.value());
}

/// Column roles for CSV ingestion: one label column, optional ignored
/// columns, every other column is a feature.
struct CsvSchema {
  std::string label_column = "y";
  std::set<std::string> ignore_columns;
};

inline Dataset load_csv(std::istream& in, const CsvSchema& schema = {}) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      auto t = detail::trim(line);
      if (t.empty() || t.front() == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line()) throw DataError("csv: missing header row");
  header = detail::split_row(line);

  std::optional<std::size_t> label_col;
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == schema.label_column) {
      if (label_col) throw DataError("csv: label column '" + header[c] + "' appears twice");
      label_col = c;
    } else if (!schema.ignore_columns.count(header[c])) {
      feature_cols.push_back(c);
      names.push_back(header[c]);
    }
  }
  if (!label_col) throw DataError("csv: no label column '" + schema.label_column + "'");

  std::vector<DataPoint> points;
  while (next_line()) {
    auto cells = detail::split_row(line);
    const std::string where = "csv line " + std::to_string(line_no);
    if (cells.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    DataPoint p;
    for (std::size_t c : feature_cols) {
      auto iv = parse_interval(cells[c]);
      if (!iv) {
        throw DataError(where + ", column '" + header[c] + "': malformed cell '" +
                        cells[c] + "'");
      }
      p.features.push_back(*iv);
    }
    auto label = parse_label(cells[*label_col]);
    if (!label) {
      throw DataError(where + ", column '" + header[*label_col] +
                      "': label must be 0, 1, ? or [0,1], got '" + cells[*label_col] + "'");
    }
    p.label = *label;
    points.push_back(std::move(p));
  }
  return Dataset(std::move(names), std::move(points));
}

inline Dataset load_csv_string(const std::string& text, const CsvSchema& schema = {}) {
  std::istringstream in(text);
  return load_csv(in, schema);
}

/// Writes the canonical form: features then the label column, intervals as
/// "[lo,hi]", precise values bare, unknown labels as "?".
inline void save_csv(std::ostream& out, const Dataset& d,
                     const std::string& label_column = "y") {
  for (const auto& name : d.feature_names()) out << name << ',';
  out << label_column << '\n';
  for (const auto& p : d.points()) {
    for (const auto& iv : p.features) out << format_interval(iv) << ',';
    out << format_label(p.label) << '\n';
  }
}

inline std::string to_csv_string(const Dataset& d) {
  std::ostringstream os;
  save_csv(os, d);
  return os.str();
}

/// FNV-1a 64-bit, rendered as 16 hex digits. Used to tie outputs to inputs,
/// not for integrity against tampering.
inline std::string digest_bytes(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string digest(const Dataset& d) { return digest_bytes(to_csv_string(d)); }

// Dataset JSON mirrors the CSV schema:
// {"feature_names": [...], "points": [{"x": [v | [lo,hi], ...], "y": 0|1|null}]}
inline nlohmann::json to_json(const Dataset& d) {
  nlohmann::json j;
  j["feature_names"] = d.feature_names();
  auto pts = nlohmann::json::array();
  for (const auto& p : d.points()) {
    nlohmann::json row;
    auto xs = nlohmann::json::array();
    for (const auto& iv : p.features) {
      if (iv.degenerate()) {
        xs.push_back(iv.lo());
      } else {
        xs.push_back({iv.lo(), iv.hi()});
      }
    }
    row["x"] = std::move(xs);
    row["y"] = p.label.is_unknown() ? nlohmann::json(nullptr) : nlohmann::json(p.label.value());
    pts.push_back(std::move(row));
  }
  j["points"] = std::move(pts);
  return j;
}

inline Dataset dataset_from_json(const nlohmann::json& j) {
  try {
    auto names = j.at("feature_names").get<std::vector<std::string>>();
    std::vector<DataPoint> points;
    for (const auto& row : j.at("points")) {
      DataPoint p;
      for (const auto& x : row.at("x")) {
        if (x.is_array()) {
          if (x.size() != 2) throw DataError("dataset json: interval needs two bounds");
          p.features.emplace_back(x[0].get<double>(), x[1].get<double>());
        } else {
          p.features.emplace_back(x.get<double>());
        }
      }
      const auto& y = row.at("y");
      p.label = y.is_null() ? UncertainLabel::unknown() : UncertainLabel::known(y.get<int>());
      points.push_back(std::move(p));
    }
    return Dataset(std::move(names), std::move(points));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("dataset json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("dataset json: ") + e.what());
  }
}

}  // namespace ilr

#endif
