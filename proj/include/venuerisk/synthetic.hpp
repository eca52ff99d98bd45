#pragma once

// Seeded synthetic venue and visit data in the ingest file schemas.
//
// Venue areas are log-uniform over [area_min, area_max] m². Each venue gets a
// log-normal popularity (raw panel visits in its peak hour under lockdown).
// The hourly Poisson mean is popularity x diurnal(hour of day) x weekday(day),
// scaled by the traffic multiplier for the pre-pandemic profile. Hour 0 is a
// Monday 00:00.
//
// Counts are drawn by Poisson inversion from a uniform stream that does not
// depend on the profile, so for one seed the pre-pandemic count of every
// venue-hour is >= the lockdown count.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "venuerisk/error.hpp"
#include "venuerisk/ingest.hpp"

namespace venuerisk::synthetic {

enum class TrafficProfile { lockdown, pre_pandemic };

inline std::string_view to_string(TrafficProfile p) {
  return p == TrafficProfile::pre_pandemic ? "pre_pandemic" : "lockdown";
}

struct SyntheticConfig {
  double area_min = 50.0;     // m²
  double area_max = 2000.0;   // m²
  double popularity_log_mean = -2.5;
  double popularity_log_sd = 0.8;
  double pre_pandemic_multiplier = 3.5;
  double drinking_place_share = 0.2;
  // Relative traffic by hour of day, 1.0 at the lunch and dinner peaks.
  std::array<double, 24> diurnal{0.02, 0.02, 0.02, 0.02, 0.02, 0.03, 0.08, 0.18, 0.30, 0.35, 0.45, 0.80,
                                 1.00, 0.75, 0.45, 0.40, 0.55, 0.85, 1.00, 0.90, 0.70, 0.50, 0.30, 0.10};
  // Monday .. Sunday.
  std::array<double, 7> weekday{0.80, 0.80, 0.85, 0.90, 1.10, 1.25, 1.05};
};

struct SyntheticDataset {
  VenueTable venues;
  std::vector<VisitSeries> visits;  // aligned with venues, raw panel counts
};

namespace detail {

// 53-bit uniform in [0, 1) straight from the engine, so output does not
// depend on the standard library's distribution implementations.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Smallest k with PoissonCDF(k; mean) > u. Monotone in mean for fixed u.
inline std::int64_t poisson_quantile(double u, double mean) {
  if (mean <= 0.0) return 0;
  std::int64_t k = 0;
  double pmf = std::exp(-mean);
  double cdf = pmf;
  const double limit = mean + 40.0 * std::sqrt(mean) + 40.0;
  while (u >= cdf && static_cast<double>(k) < limit) {
    ++k;
    pmf *= mean / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

}  // namespace detail

inline SyntheticDataset generate(std::size_t n_venues, TrafficProfile profile, std::uint64_t seed,
                                 const SyntheticConfig& cfg = {}) {
  if (n_venues == 0) throw ArgumentError("n_venues must be positive");
  if (!(cfg.area_min > 0.0) || !(cfg.area_max >= cfg.area_min)) throw ArgumentError("invalid area range");
  if (!(cfg.pre_pandemic_multiplier > 0.0)) throw ArgumentError("traffic multiplier must be positive");
  if (!(cfg.popularity_log_sd >= 0.0)) throw ArgumentError("popularity spread must be non-negative");

  const double scale = profile == TrafficProfile::pre_pandemic ? cfg.pre_pandemic_multiplier : 1.0;
  const double log_lo = std::log(cfg.area_min);
  const double log_hi = std::log(cfg.area_max);
  std::mt19937_64 rng(seed);

  SyntheticDataset out;
  out.venues.reserve(n_venues);
  out.visits.reserve(n_venues);
  char id[32];
  for (std::size_t i = 0; i < n_venues; ++i) {
    std::snprintf(id, sizeof id, "v%05zu", i + 1);
    Venue v;
    v.venue_id = id;
    v.area = std::exp(log_lo + (log_hi - log_lo) * detail::uniform01(rng));
    const bool bar = detail::uniform01(rng) < cfg.drinking_place_share;
    v.category = bar ? "Drinking Places (Alcoholic Beverages)" : "Restaurants and Other Eating Places";
    v.name = (bar ? "Synthetic Bar " : "Synthetic Restaurant ") + std::to_string(i + 1);
    const double popularity = std::exp(cfg.popularity_log_mean + cfg.popularity_log_sd * detail::standard_normal(rng));

    VisitSeries s;
    s.venue_id = v.venue_id;
    s.hourly_counts.resize(kHoursPerWeek);
    for (std::size_t h = 0; h < kHoursPerWeek; ++h) {
      const double mean = scale * popularity * cfg.diurnal[h % 24] * cfg.weekday[h / 24];
      s.hourly_counts[h] = static_cast<double>(detail::poisson_quantile(detail::uniform01(rng), mean));
    }
    out.venues.push_back(std::move(v));
    out.visits.push_back(std::move(s));
  }
  return out;
}

// Venue file with areas in m².
inline void write_venue_file(std::ostream& out, const SyntheticDataset& d) { write_venues(out, d.venues); }

inline void write_visit_file(std::ostream& out, const SyntheticDataset& d) { write_visits(out, d.visits); }

}  // namespace venuerisk::synthetic
