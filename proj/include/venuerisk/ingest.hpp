#pragma once

// Venue metadata and hourly visit ingestion.
//
// Venue file:  venue_id,name,category,area      (area unit chosen by caller)
// Visit file:  venue_id,hour,count               (hour is a 0-based offset)
//
// Everything downstream works in square meters and cubic meters. Counts are
// real-valued expected visitors, so scaling and capping stay linear.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "venuerisk/error.hpp"
#include "venuerisk/text.hpp"

namespace venuerisk {

inline constexpr double kSquareFootInSquareMeters = 0.09290304;
inline constexpr std::size_t kHoursPerWeek = 168;
inline constexpr const char* kDefaultWindowStart = "2020-11-02T00:00";

enum class AreaUnit { square_meters, square_feet };

struct Venue {
  std::string venue_id;
  std::string name;
  std::string category;
  double area = 0.0;              // m²
  std::optional<double> volume;   // m³, set by compute_volumes
};

struct VisitSeries {
  std::string venue_id;
  std::string window_start = kDefaultWindowStart;
  std::vector<double> hourly_counts;
};

using VenueTable = std::vector<Venue>;
using VisitTable = std::map<std::string, VisitSeries>;

// Joined input. visits[i] always belongs to venues[i].
struct SimulationInput {
  std::vector<Venue> venues;
  std::vector<VisitSeries> visits;
  std::size_t window_hours = kHoursPerWeek;
  double sampling_factor_applied = 1.0;

  std::size_t size() const noexcept { return venues.size(); }
};

namespace detail {

// Skips leading blank lines and checks the header row. `empty` is set when
// the source holds nothing but blanks.
inline void expect_header(text::LineReader& reader, std::string& line,
                          const std::vector<std::string>& header, bool& empty) {
  empty = true;
  while (reader.next(line)) {
    if (text::trim(line).empty()) continue;
    empty = false;
    auto fields = text::split_csv(line);
    bool ok = fields && fields->size() == header.size();
    for (std::size_t i = 0; ok && i < header.size(); ++i) {
      ok = text::trim((*fields)[i]) == header[i];
    }
    if (!ok) {
      std::string want;
      for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
      throw RecordError(reader.line_no(), "expected header '" + want + "'");
    }
    break;
  }
}

}  // namespace detail

inline double to_square_meters(double area, AreaUnit unit) {
  return unit == AreaUnit::square_feet ? area * kSquareFootInSquareMeters : area;
}

// Parses the venue file. Volumes are left unset.
inline VenueTable parse_venues(std::istream& source, AreaUnit unit) {
  static const std::vector<std::string> header{"venue_id", "name", "category", "area"};
  text::LineReader reader(source);
  std::string line;
  bool empty = true;
  detail::expect_header(reader, line, header, empty);
  VenueTable venues;
  if (empty) return venues;

  std::unordered_set<std::string> seen;
  std::vector<std::string> duplicates;
  while (reader.next(line)) {
    if (text::trim(line).empty()) continue;
    const auto fields = text::split_csv(line);
    if (!fields) throw RecordError(reader.line_no(), "unterminated quote");
    if (fields->size() != header.size()) {
      throw RecordError(reader.line_no(), "expected 4 fields, got " + std::to_string(fields->size()));
    }
    Venue v;
    v.venue_id = std::string(text::trim((*fields)[0]));
    v.name = (*fields)[1];
    v.category = (*fields)[2];
    if (v.venue_id.empty()) throw RecordError(reader.line_no(), "empty venue_id");
    const auto area = text::parse_double((*fields)[3]);
    if (!area) throw RecordError(reader.line_no(), "area is not a number: '" + (*fields)[3] + "'");
    if (*area <= 0.0) throw RecordError(reader.line_no(), "area must be positive");
    v.area = to_square_meters(*area, unit);
    if (!seen.insert(v.venue_id).second) duplicates.push_back(v.venue_id);
    venues.push_back(std::move(v));
  }
  if (!duplicates.empty()) {
    std::string list;
    for (const auto& id : duplicates) list += (list.empty() ? "" : ", ") + id;
    throw DatasetError("duplicate venue_id: " + list, duplicates);
  }
  return venues;
}

// Parses the visit file into one zero-filled series per venue. Counts are
// kept as read; no sampling correction is applied here.
inline VisitTable parse_visits(std::istream& source, std::size_t window_hours,
                               const std::string& window_start = kDefaultWindowStart) {
  if (window_hours == 0) throw ArgumentError("window_hours must be positive");
  static const std::vector<std::string> header{"venue_id", "hour", "count"};
  text::LineReader reader(source);
  std::string line;
  bool empty = true;
  detail::expect_header(reader, line, header, empty);
  VisitTable visits;
  if (empty) return visits;

  std::set<std::pair<std::string, std::size_t>> filled;
  while (reader.next(line)) {
    if (text::trim(line).empty()) continue;
    const auto fields = text::split_csv(line);
    if (!fields) throw RecordError(reader.line_no(), "unterminated quote");
    if (fields->size() != header.size()) {
      throw RecordError(reader.line_no(), "expected 3 fields, got " + std::to_string(fields->size()));
    }
    const std::string id(text::trim((*fields)[0]));
    if (id.empty()) throw RecordError(reader.line_no(), "empty venue_id");
    const auto hour = text::parse_int((*fields)[1]);
    if (!hour) throw RecordError(reader.line_no(), "hour is not an integer: '" + (*fields)[1] + "'");
    if (*hour < 0 || static_cast<std::size_t>(*hour) >= window_hours) {
      throw RecordError(reader.line_no(), "hour " + std::to_string(*hour) + " outside [0, " +
                                              std::to_string(window_hours) + ")");
    }
    const auto count = text::parse_double((*fields)[2]);
    if (!count) throw RecordError(reader.line_no(), "count is not a number: '" + (*fields)[2] + "'");
    if (*count < 0.0) throw RecordError(reader.line_no(), "count must be non-negative");

    const auto h = static_cast<std::size_t>(*hour);
    if (!filled.emplace(id, h).second) {
      throw RecordError(reader.line_no(), "duplicate row for venue '" + id + "' hour " + std::to_string(h));
    }
    auto [it, inserted] = visits.try_emplace(id);
    if (inserted) {
      it->second.venue_id = id;
      it->second.window_start = window_start;
      it->second.hourly_counts.assign(window_hours, 0.0);
    }
    it->second.hourly_counts[h] = *count;
  }
  return visits;
}

inline VisitSeries apply_sampling_correction(VisitSeries series, double factor) {
  if (!(factor > 0.0)) throw ArgumentError("sampling factor must be positive");
  for (auto& c : series.hourly_counts) c *= factor;
  return series;
}

inline VisitTable apply_sampling_correction(VisitTable visits, double factor) {
  if (!(factor > 0.0)) throw ArgumentError("sampling factor must be positive");
  for (auto& [id, series] : visits) {
    for (auto& c : series.hourly_counts) c *= factor;
  }
  return visits;
}

// Scales every count and records the cumulative factor in the audit field.
inline SimulationInput apply_sampling_correction(SimulationInput input, double factor) {
  if (!(factor > 0.0)) throw ArgumentError("sampling factor must be positive");
  for (auto& series : input.visits) {
    for (auto& c : series.hourly_counts) c *= factor;
  }
  input.sampling_factor_applied *= factor;
  return input;
}

inline VenueTable compute_volumes(VenueTable venues, double ceiling_height) {
  if (!(ceiling_height > 0.0)) throw ArgumentError("ceiling height must be positive");
  for (auto& v : venues) {
    if (!(v.area > 0.0)) throw ArgumentError("venue '" + v.venue_id + "' has no positive area");
    v.volume = v.area * ceiling_height;
  }
  return venues;
}

// Key join of venues and visit series. Venues without visits get an
// all-zero series; visits for unknown venues are rejected.
inline SimulationInput join(const VenueTable& venues, const VisitTable& visits,
                            std::size_t window_hours,
                            const std::string& window_start = kDefaultWindowStart) {
  if (window_hours == 0) throw ArgumentError("window_hours must be positive");
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(venues.size());
  for (std::size_t i = 0; i < venues.size(); ++i) {
    if (!index.emplace(venues[i].venue_id, i).second) {
      throw DatasetError("duplicate venue_id: " + venues[i].venue_id, {venues[i].venue_id});
    }
  }

  std::vector<std::string> unknown;
  for (const auto& [id, series] : visits) {
    if (!index.contains(id)) unknown.push_back(id);
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& id : unknown) list += (list.empty() ? "" : ", ") + id;
    throw DatasetError("visits reference unknown venue_id: " + list, unknown);
  }

  SimulationInput input;
  input.window_hours = window_hours;
  input.venues = venues;
  input.visits.reserve(venues.size());
  for (const auto& v : venues) {
    if (const auto it = visits.find(v.venue_id); it != visits.end()) {
      if (it->second.hourly_counts.size() != window_hours) {
        throw DatasetError("visit series for '" + v.venue_id + "' has " +
                               std::to_string(it->second.hourly_counts.size()) + " hours, expected " +
                               std::to_string(window_hours),
                           {v.venue_id});
      }
      input.visits.push_back(it->second);
    } else {
      input.visits.push_back(VisitSeries{v.venue_id, window_start, std::vector<double>(window_hours, 0.0)});
    }
  }
  return input;
}

// Writers emit the same schemas the parsers read (area in m², zero hours
// omitted), with shortest round-trip number formatting.
inline void write_venues(std::ostream& out, const VenueTable& venues) {
  out << "venue_id,name,category,area\n";
  for (const auto& v : venues) {
    out << text::csv_escape(v.venue_id) << ',' << text::csv_escape(v.name) << ','
        << text::csv_escape(v.category) << ',' << text::format_double(v.area) << '\n';
  }
}

inline void write_visits(std::ostream& out, const std::vector<VisitSeries>& visits) {
  out << "venue_id,hour,count\n";
  for (const auto& s : visits) {
    for (std::size_t h = 0; h < s.hourly_counts.size(); ++h) {
      if (s.hourly_counts[h] == 0.0) continue;
      out << text::csv_escape(s.venue_id) << ',' << h << ',' << text::format_double(s.hourly_counts[h])
          << '\n';
    }
  }
}

}  // namespace venuerisk
