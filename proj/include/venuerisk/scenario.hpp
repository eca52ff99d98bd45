#pragma once

// Counterfactual scenarios: an alternate visit source, a sampling factor,
// an optional physical-distancing occupancy cap and parameter overrides,
// applied to a shared base input.
//
// Pipeline order in run_scenario:
//   1. select visit source (baseline or alternate file joined on the base venues)
//   2. bring counts to the scenario's sampling factor
//   3. cap each venue at max_distanced_occupancy(area, spacing) if distancing is set
//   4. merge parameter overrides
//   5. simulate_week
//   6. classify severities and count them

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "venuerisk/epi.hpp"
#include "venuerisk/error.hpp"
#include "venuerisk/ingest.hpp"
#include "venuerisk/stats.hpp"
#include "venuerisk/text.hpp"

namespace venuerisk {

inline constexpr double kFootInMeters = 0.3048;
inline constexpr double kSixFeetInMeters = 6.0 * kFootInMeters;  // 1.8288 m
inline constexpr double kDefaultSamplingFactor = 10.0;

// Maximum simultaneous occupants when each person claims an exclusion disc
// of radius `spacing`. A circular room of radius 6 ft holds exactly one.
inline std::int64_t max_distanced_occupancy(double area, double spacing) {
  if (!(area > 0.0) || !std::isfinite(area)) throw ArgumentError("area must be positive");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ArgumentError("spacing must be positive");
  const double disc = std::numbers::pi * spacing * spacing;
  return static_cast<std::int64_t>(std::floor(area / disc));
}

// Turned-away visitors vanish; nothing spills into later hours.
inline VisitSeries apply_occupancy_cap(VisitSeries visits, std::int64_t cap) {
  if (cap < 0) throw ArgumentError("occupancy cap must be non-negative");
  const double c = static_cast<double>(cap);
  for (auto& n : visits.hourly_counts) n = std::min(n, c);
  return visits;
}

// Partial EpiParams; set fields replace the base value.
struct ParamsOverride {
  std::optional<double> q, p, ach, ceiling_height, t, documented_prevalence, underreport_factor;

  bool empty() const {
    return !q && !p && !ach && !ceiling_height && !t && !documented_prevalence && !underreport_factor;
  }
};

inline EpiParams merge(EpiParams base, const ParamsOverride& o) {
  if (o.q) base.q = *o.q;
  if (o.p) base.p = *o.p;
  if (o.ach) base.ach = *o.ach;
  if (o.ceiling_height) base.ceiling_height = *o.ceiling_height;
  if (o.t) base.t = *o.t;
  if (o.documented_prevalence) base.documented_prevalence = *o.documented_prevalence;
  if (o.underreport_factor) base.underreport_factor = *o.underreport_factor;
  return base;
}

struct BaselineVisits {};
struct AlternateVisitFile {
  std::filesystem::path path;
};
using VisitSource = std::variant<BaselineVisits, AlternateVisitFile>;

struct Distancing {
  double spacing = kSixFeetInMeters;  // m
};

struct ScenarioConfig {
  std::string name = "baseline";
  VisitSource visit_source = BaselineVisits{};
  double sampling_factor = kDefaultSamplingFactor;
  std::optional<Distancing> distancing;
  ParamsOverride params_override;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<Venue> venues;  // with the volumes actually simulated
  std::vector<VenueResult> results;
  std::size_t severe_count = 0;
  std::size_t mild_count = 0;
};

// ---------------------------------------------------------------------------
// Config files

// Parses a length with a mandatory unit suffix: "6ft", "1.8288m", "72in".
inline double parse_length(std::string_view s) {
  s = text::trim(s);
  struct Unit {
    std::string_view suffix;
    double meters;
  };
  // "cm" must be tried before "m".
  static constexpr Unit units[] = {{"feet", kFootInMeters}, {"ft", kFootInMeters}, {"in", 0.0254},
                                   {"cm", 0.01},            {"m", 1.0}};
  for (const auto& u : units) {
    if (s.size() > u.suffix.size() && s.substr(s.size() - u.suffix.size()) == u.suffix) {
      const auto v = text::parse_double(s.substr(0, s.size() - u.suffix.size()));
      if (!v) break;
      return *v * u.meters;
    }
  }
  throw ConfigError("length '" + std::string(s) + "' needs a number and a unit suffix (ft, in, m, cm)");
}

namespace detail {

inline double config_number(const text::KeyValue& kv) {
  const auto v = text::parse_double(kv.value);
  if (!v) throw ConfigError("line " + std::to_string(kv.line) + ": '" + kv.key + "' is not a number: '" + kv.value + "'");
  return *v;
}

// Applies one EpiParams key to an override. Returns false for unknown keys.
inline bool set_param(ParamsOverride& o, const text::KeyValue& kv) {
  using Field = std::optional<double> ParamsOverride::*;
  static const std::pair<std::string_view, Field> fields[] = {
      {"q", &ParamsOverride::q},
      {"p", &ParamsOverride::p},
      {"ach", &ParamsOverride::ach},
      {"ceiling_height", &ParamsOverride::ceiling_height},
      {"t", &ParamsOverride::t},
      {"documented_prevalence", &ParamsOverride::documented_prevalence},
      {"underreport_factor", &ParamsOverride::underreport_factor},
  };
  for (const auto& [key, field] : fields) {
    if (kv.key == key) {
      o.*field = config_number(kv);
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Params file: key = value lines with keys q, p, ach, ceiling_height, t,
// documented_prevalence, underreport_factor. Missing keys keep the base value.
inline ParamsOverride parse_params_override(std::istream& in) {
  ParamsOverride o;
  for (const auto& kv : text::parse_key_values(in)) {
    if (!detail::set_param(o, kv)) {
      throw ConfigError("line " + std::to_string(kv.line) + ": unknown parameter '" + kv.key + "'");
    }
  }
  return o;
}

// Scenario file keys:
//   name            = <string>
//   visit_source    = baseline | <path to visit file>   (relative to base_dir)
//   sampling_factor = <positive real>
//   spacing         = <real><unit> | none
//   plus any params-file key as an override.
inline ScenarioConfig parse_scenario_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  ScenarioConfig cfg;
  for (const auto& kv : text::parse_key_values(in)) {
    const auto where = "line " + std::to_string(kv.line) + ": ";
    if (kv.key == "name") {
      if (kv.value.empty()) throw ConfigError(where + "empty scenario name");
      cfg.name = kv.value;
    } else if (kv.key == "visit_source") {
      if (kv.value.empty()) throw ConfigError(where + "empty visit_source");
      if (kv.value == "baseline") {
        cfg.visit_source = BaselineVisits{};
      } else {
        std::filesystem::path p(kv.value);
        cfg.visit_source = AlternateVisitFile{p.is_relative() ? base_dir / p : p};
      }
    } else if (kv.key == "sampling_factor") {
      cfg.sampling_factor = detail::config_number(kv);
      if (!(cfg.sampling_factor > 0.0)) throw ConfigError(where + "sampling_factor must be positive");
    } else if (kv.key == "spacing") {
      if (kv.value == "none") {
        cfg.distancing.reset();
      } else {
        double m = 0.0;
        try {
          m = parse_length(kv.value);
        } catch (const ConfigError& e) {
          throw ConfigError(where + e.what());
        }
        if (!(m > 0.0)) throw ConfigError(where + "spacing must be positive");
        cfg.distancing = Distancing{m};
      }
    } else if (!detail::set_param(cfg.params_override, kv)) {
      throw ConfigError(where + "unknown key '" + kv.key + "'");
    }
  }
  return cfg;
}

inline ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario config '" + path.string() + "'");
  return parse_scenario_config(in, path.parent_path());
}

// ---------------------------------------------------------------------------
// Running

// Reads an alternate visit file; the default opens it from disk.
using VisitFileLoader = std::function<VisitTable(const std::filesystem::path&, std::size_t window_hours)>;

inline VisitTable load_visit_file(const std::filesystem::path& path, std::size_t window_hours) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open visit file '" + path.string() + "'");
  return parse_visits(in, window_hours);
}

// `base` may already carry a sampling correction (its audit field); counts
// are rescaled so the result reflects exactly config.sampling_factor.
inline ScenarioResult run_scenario(const SimulationInput& base, const ScenarioConfig& config,
                                   const EpiParams& params, double severe_threshold = kDefaultSevereThreshold,
                                   const VisitFileLoader& loader = load_visit_file) {
  if (!(config.sampling_factor > 0.0)) throw ArgumentError("sampling factor must be positive");
  if (config.distancing && !(config.distancing->spacing > 0.0)) throw ArgumentError("spacing must be positive");

  // 1 + 2
  SimulationInput input;
  if (const auto* alt = std::get_if<AlternateVisitFile>(&config.visit_source)) {
    VenueTable venues = base.venues;
    input = join(venues, loader(alt->path, base.window_hours), base.window_hours);
    input = apply_sampling_correction(std::move(input), config.sampling_factor);
  } else if (config.sampling_factor == base.sampling_factor_applied) {
    input = base;
  } else {
    input = apply_sampling_correction(base, config.sampling_factor / base.sampling_factor_applied);
    input.sampling_factor_applied = config.sampling_factor;
  }

  // 3
  if (config.distancing) {
    for (std::size_t i = 0; i < input.size(); ++i) {
      const auto cap = max_distanced_occupancy(input.venues[i].area, config.distancing->spacing);
      input.visits[i] = apply_occupancy_cap(std::move(input.visits[i]), cap);
    }
  }

  // 4 + 5
  const EpiParams merged = merge(params, config.params_override);
  validate(merged);
  input.venues = compute_volumes(std::move(input.venues), merged.ceiling_height);

  ScenarioResult out;
  out.config = config;
  out.results = simulate_week(input, merged, severe_threshold);
  out.venues = std::move(input.venues);

  // 6
  for (const auto& r : out.results) {
    (r.severity == Severity::severe ? out.severe_count : out.mild_count)++;
  }
  return out;
}

inline std::vector<double> weekly_values(const std::vector<VenueResult>& results) {
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.weekly_infections);
  return out;
}

}  // namespace venuerisk
