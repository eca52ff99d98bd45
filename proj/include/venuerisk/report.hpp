#pragma once

// Report files: per-venue CSV, hourly CSV, histogram CSV, summary and
// comparison JSON, and the run manifest they all point back to.
//
// Every report carries the SHA-256 of the manifest's reproducible content
// (everything except the wall-clock timestamp), so two identical runs give
// byte-identical reports.

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"
#include "venuerisk/epi.hpp"
#include "venuerisk/error.hpp"
#include "venuerisk/ingest.hpp"
#include "venuerisk/scenario.hpp"
#include "venuerisk/stats.hpp"
#include "venuerisk/text.hpp"

namespace venuerisk::report {

inline constexpr std::string_view kToolVersion = "0.1.0";

using json = nlohmann::ordered_json;

inline std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
  return ss.str();
}

// ---------------------------------------------------------------------------
// JSON views of domain types

inline json to_json(const EpiParams& p) {
  json j;
  j["q"] = p.q;
  j["p"] = p.p;
  j["ach"] = p.ach;
  j["ceiling_height"] = p.ceiling_height;
  j["t"] = p.t;
  j["documented_prevalence"] = p.documented_prevalence ? json(*p.documented_prevalence) : json(nullptr);
  j["underreport_factor"] = p.underreport_factor;
  return j;
}

inline json to_json(const ParamsOverride& o) {
  json j = json::object();
  auto put = [&](const char* k, const std::optional<double>& v) {
    if (v) j[k] = *v;
  };
  put("q", o.q);
  put("p", o.p);
  put("ach", o.ach);
  put("ceiling_height", o.ceiling_height);
  put("t", o.t);
  put("documented_prevalence", o.documented_prevalence);
  put("underreport_factor", o.underreport_factor);
  return j;
}

inline json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  if (const auto* alt = std::get_if<AlternateVisitFile>(&c.visit_source)) {
    j["visit_source"] = alt->path.generic_string();
  } else {
    j["visit_source"] = "baseline";
  }
  j["sampling_factor"] = c.sampling_factor;
  j["spacing_m"] = c.distancing ? json(c.distancing->spacing) : json(nullptr);
  j["params_override"] = to_json(c.params_override);
  return j;
}

inline json to_json(const Histogram& h) {
  json j;
  j["scale"] = std::string(to_string(h.scale));
  j["bin_edges"] = h.bin_edges;
  j["counts"] = h.counts;
  j["excluded"] = h.excluded;
  return j;
}

// ---------------------------------------------------------------------------
// Run manifest

struct RunManifest {
  std::string tool_version{kToolVersion};
  std::map<std::string, std::string> input_file_digests;  // path -> sha256
  EpiParams resolved_params;
  std::vector<ScenarioConfig> scenario_configs;
  double severe_threshold = kDefaultSevereThreshold;
  std::string timestamp;  // UTC, ISO 8601

  void add_input(const std::filesystem::path& path, std::string_view content) {
    input_file_digests[path.generic_string()] = sha256_hex(content);
  }

  // Everything but the timestamp.
  json reproducible_json() const {
    json j;
    j["tool_version"] = tool_version;
    j["input_file_digests"] = input_file_digests;
    j["resolved_params"] = report::to_json(resolved_params);
    j["severe_threshold"] = severe_threshold;
    json configs = json::array();
    for (const auto& c : scenario_configs) configs.push_back(report::to_json(c));
    j["scenario_configs"] = configs;
    return j;
  }

  std::string hash() const { return sha256_hex(reproducible_json().dump()); }

  json to_json() const {
    json j = reproducible_json();
    j["timestamp"] = timestamp;
    j["manifest_sha256"] = hash();
    return j;
  }
};

inline std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// CSV reports

inline std::string manifest_comment(const std::string& manifest_hash) {
  return "# manifest_sha256=" + manifest_hash + "\n";
}

// venues and results must be aligned (same order, same ids).
inline std::string results_csv(const std::vector<Venue>& venues, const std::vector<VenueResult>& results,
                               const std::string& manifest_hash) {
  if (venues.size() != results.size()) throw DatasetError("venue and result tables differ in size");
  std::string out = manifest_comment(manifest_hash);
  out += "venue_id,name,category,area_m2,volume_m3,weekly_infections,severity\n";
  for (std::size_t i = 0; i < venues.size(); ++i) {
    const auto& v = venues[i];
    const auto& r = results[i];
    out += text::csv_escape(v.venue_id) + ',' + text::csv_escape(v.name) + ',' + text::csv_escape(v.category) +
           ',' + text::format_double(v.area) + ',' + (v.volume ? text::format_double(*v.volume) : std::string()) +
           ',' + text::format_double(r.weekly_infections) + ',' + std::string(to_string(r.severity)) + '\n';
  }
  return out;
}

// Long format, non-zero hours only.
inline std::string hourly_csv(const std::vector<VenueResult>& results, const std::string& manifest_hash) {
  std::string out = manifest_comment(manifest_hash);
  out += "venue_id,hour,expected_infections\n";
  for (const auto& r : results) {
    for (std::size_t h = 0; h < r.hourly_infections.size(); ++h) {
      if (r.hourly_infections[h] == 0.0) continue;
      out += text::csv_escape(r.venue_id) + ',' + std::to_string(h) + ',' +
             text::format_double(r.hourly_infections[h]) + '\n';
    }
  }
  return out;
}

inline std::string histogram_csv(const Histogram& h, const std::string& manifest_hash) {
  std::string out = manifest_comment(manifest_hash);
  out += "# scale=" + std::string(to_string(h.scale)) + " excluded=" + std::to_string(h.excluded) + "\n";
  out += "bin_lower,bin_upper,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += text::format_double(h.bin_edges[i]) + ',' + text::format_double(h.bin_edges[i + 1]) + ',' +
           std::to_string(h.counts[i]) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON reports

inline json scenario_summary(const ScenarioResult& s) {
  double total = 0.0;
  for (const auto& r : s.results) total += r.weekly_infections;
  json j;
  j["scenario"] = s.config.name;
  j["venue_count"] = s.results.size();
  j["severe_count"] = s.severe_count;
  j["mild_count"] = s.mild_count;
  j["total_expected_infections"] = total;
  return j;
}

inline std::string summary_json(const ScenarioResult& s, const Histogram& h, const std::string& manifest_hash) {
  json j = scenario_summary(s);
  const auto weekly = weekly_values(s.results);
  std::vector<double> positive;
  for (double w : weekly) {
    if (w > 0.0) positive.push_back(w);
  }
  j["positive_venue_count"] = positive.size();
  try {
    const auto fit = fit_log_normal(positive);
    j["log_normal_fit"] = {{"mu", fit.mu}, {"sigma", fit.sigma}};
  } catch (const ArgumentError&) {
    j["log_normal_fit"] = nullptr;
  }
  j["histogram"] = to_json(h);
  j["manifest_sha256"] = manifest_hash;
  return j.dump(2) + "\n";
}

inline std::string comparison_json(const ScenarioResult& a, const ScenarioResult& b, const ComparisonResult& c,
                                   const std::string& manifest_hash) {
  json j;
  j["scenario_a"] = scenario_summary(a);
  j["scenario_b"] = scenario_summary(b);
  j["test"] = c.pooled ? "pooled" : "welch";
  j["t_stat"] = c.t_stat;
  j["degrees_of_freedom"] = c.degrees_of_freedom;
  j["p_value"] = c.p_value;
  j["mean_a"] = c.mean_a;
  j["mean_b"] = c.mean_b;
  j["histogram_a"] = to_json(c.histogram_a);
  j["histogram_b"] = to_json(c.histogram_b);
  j["manifest_sha256"] = manifest_hash;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Hotspot ranking from a results CSV

struct HotspotRow {
  std::string venue_id;
  std::string name;
  double weekly_infections = 0.0;
  Severity severity = Severity::mild;
};

inline std::vector<HotspotRow> parse_results_csv(std::istream& in) {
  text::LineReader reader(in);
  std::string line;
  std::vector<HotspotRow> rows;
  std::size_t id_col = 0, name_col = 0, weekly_col = 0;
  bool have_header = false;
  while (reader.next(line)) {
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto fields = text::split_csv(line);
    if (!fields) throw RecordError(reader.line_no(), "unterminated quote");
    if (!have_header) {
      auto find = [&](std::string_view col) {
        const auto it = std::find(fields->begin(), fields->end(), col);
        if (it == fields->end()) throw RecordError(reader.line_no(), "results header lacks '" + std::string(col) + "'");
        return static_cast<std::size_t>(it - fields->begin());
      };
      id_col = find("venue_id");
      name_col = find("name");
      weekly_col = find("weekly_infections");
      have_header = true;
      continue;
    }
    const std::size_t need = std::max({id_col, name_col, weekly_col}) + 1;
    if (fields->size() < need) throw RecordError(reader.line_no(), "too few fields");
    const auto w = text::parse_double((*fields)[weekly_col]);
    if (!w || *w < 0.0) throw RecordError(reader.line_no(), "bad weekly_infections '" + (*fields)[weekly_col] + "'");
    rows.push_back({(*fields)[id_col], (*fields)[name_col], *w, Severity::mild});
  }
  return rows;
}

// Sorted by weekly infections, highest first; ties keep file order.
// top_k == 0 keeps every row.
inline std::vector<HotspotRow> rank_hotspots(std::vector<HotspotRow> rows, double threshold, std::size_t top_k = 0) {
  for (auto& r : rows) r.severity = classify(r.weekly_infections, threshold);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const HotspotRow& a, const HotspotRow& b) { return a.weekly_infections > b.weekly_infections; });
  if (top_k != 0 && rows.size() > top_k) rows.resize(top_k);
  return rows;
}

inline std::string hotspots_csv(const std::vector<HotspotRow>& rows) {
  std::string out = "rank,venue_id,name,weekly_infections,severity\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += std::to_string(i + 1) + ',' + text::csv_escape(rows[i].venue_id) + ',' + text::csv_escape(rows[i].name) +
           ',' + text::format_double(rows[i].weekly_infections) + ',' + std::string(to_string(rows[i].severity)) +
           '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

// Writes every file to a staging directory inside `dir`, then renames each
// into place. Nothing is left behind on failure.
inline void write_files_atomically(const std::filesystem::path& dir,
                                   const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  const fs::path staging = dir / (".staging-" + std::to_string(::getpid()));
  fs::create_directory(staging, ec);
  if (ec) throw IoError("cannot create staging directory '" + staging.string() + "': " + ec.message());
  try {
    for (const auto& [name, content] : files) {
      std::ofstream out(staging / name, std::ios::binary | std::ios::trunc);
      out << content;
      out.close();
      if (!out) throw IoError("cannot write '" + (staging / name).string() + "'");
    }
    for (const auto& [name, content] : files) {
      fs::rename(staging / name, dir / name, ec);
      if (ec) throw IoError("cannot move '" + name + "' into '" + dir.string() + "': " + ec.message());
    }
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(staging, ec);
}

}  // namespace venuerisk::report
