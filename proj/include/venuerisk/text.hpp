#pragma once

// Small text helpers shared by the file readers and report writers:
// quote-aware CSV splitting, strict number parsing, shortest round-trip
// number formatting and a key = value config reader.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "venuerisk/error.hpp"

namespace venuerisk::text {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
// Returns nullopt on an unterminated quote.
inline std::optional<std::vector<std::string>> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Whole-field, finite-only double parse. Leading/trailing blanks allowed.
inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Shortest representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, ptr);
}

// Reads a source line by line, tracking 1-based line numbers and stripping
// a UTF-8 byte order mark on the first line.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (line_no_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line;
};

// `key = value` lines; `#` starts a comment, blank lines are skipped.
// A line without '=' or with an empty key is a ConfigError.
inline std::vector<KeyValue> parse_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  LineReader reader(in);
  std::string line;
  while (reader.next(line)) {
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(reader.line_no()) + ": expected key = value");
    }
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(reader.line_no()) + ": empty key");
    }
    out.push_back({std::string(key), std::string(value), reader.line_no()});
  }
  return out;
}

}  // namespace venuerisk::text
