#pragma once

// Prevalence and Wells-Riley airborne transmission.
//
//   P = 1 - exp(-I q p t / Q),   Q = ach * V
//   C = S * P,                   I = N * prevalence, S = N - I
//
// I is an expected (fractional) infector count, so the whole pipeline is
// deterministic and linear in the input counts up to the exponential.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "venuerisk/error.hpp"
#include "venuerisk/ingest.hpp"
#include "venuerisk/stats.hpp"

namespace venuerisk {

struct EpiParams {
  double q = 20.0;                 // quanta/h emitted per infector
  double p = 0.48;                 // m³/h breathed per susceptible
  double ach = 4.0;                // air changes per hour
  double ceiling_height = 3.0;     // m
  double t = 1.0;                  // h of exposure per cohort
  std::optional<double> documented_prevalence;  // no default on purpose
  double underreport_factor = 15.0;
};

// Checks the transmission constants only; prevalence is checked where used.
inline void validate_transmission(const EpiParams& params) {
  if (!(params.q > 0.0)) throw ArgumentError("q must be positive");
  if (!(params.p > 0.0)) throw ArgumentError("p must be positive");
  if (!(params.ach > 0.0)) throw ArgumentError("ach must be positive");
  if (!(params.ceiling_height > 0.0)) throw ArgumentError("ceiling_height must be positive");
  if (!(params.t > 0.0)) throw ArgumentError("t must be positive");
  if (!std::isfinite(params.q * params.p * params.t)) throw ArgumentError("transmission constants must be finite");
}

inline void validate(const EpiParams& params) {
  validate_transmission(params);
  if (!params.documented_prevalence) throw ArgumentError("documented_prevalence is required");
  const double d = *params.documented_prevalence;
  if (!(d >= 0.0 && d <= 1.0)) throw ArgumentError("documented_prevalence must lie in [0, 1]");
  if (!(params.underreport_factor >= 1.0) || !std::isfinite(params.underreport_factor)) {
    throw ArgumentError("underreport_factor must be >= 1");
  }
}

inline double prevalence_rate(double infected, double population) {
  if (!(population > 0.0)) throw ArgumentError("population must be positive");
  if (!(infected >= 0.0)) throw ArgumentError("infected must be non-negative");
  if (infected > population) throw ArgumentError("infected exceeds population");
  return infected / population;
}

// Documented prevalence scaled for under-reporting, clamped at certainty.
inline double effective_prevalence(double documented, double underreport_factor) {
  if (!(documented >= 0.0 && documented <= 1.0)) throw ArgumentError("documented prevalence must lie in [0, 1]");
  if (!(underreport_factor >= 1.0) || !std::isfinite(underreport_factor)) {
    throw ArgumentError("underreport factor must be >= 1");
  }
  return std::min(1.0, documented * underreport_factor);
}

inline double effective_prevalence(const EpiParams& params) {
  validate(params);
  return effective_prevalence(*params.documented_prevalence, params.underreport_factor);
}

// Exponent I q p t / Q of the Wells-Riley model.
inline double wells_riley_exponent(double infectors, const EpiParams& params, double room_volume) {
  validate_transmission(params);
  if (!(room_volume > 0.0) || !std::isfinite(room_volume)) throw ArgumentError("room volume must be positive");
  if (!(infectors >= 0.0) || !std::isfinite(infectors)) throw ArgumentError("infectors must be non-negative");
  const double supply = params.ach * room_volume;
  return infectors * params.q * params.p * params.t / supply;
}

// Infection probability for one susceptible. -expm1(-x) keeps full relative
// precision for tiny exponents where 1 - exp(-x) would cancel to zero.
inline double wells_riley_probability(double infectors, const EpiParams& params, double room_volume) {
  return -std::expm1(-wells_riley_exponent(infectors, params, room_volume));
}

inline double expected_new_infections_hour(double visitors, double prevalence, const EpiParams& params,
                                           double room_volume) {
  if (!(visitors >= 0.0) || !std::isfinite(visitors)) throw ArgumentError("visitors must be non-negative");
  if (!(prevalence >= 0.0 && prevalence <= 1.0)) throw ArgumentError("prevalence must lie in [0, 1]");
  const double infectors = visitors * prevalence;
  const double susceptible = visitors - infectors;
  const double prob = wells_riley_probability(infectors, params, room_volume);
  if (visitors == 0.0) return 0.0;
  return susceptible * prob;
}

struct VenueResult {
  std::string venue_id;
  std::vector<double> hourly_infections;
  double weekly_infections = 0.0;
  Severity severity = Severity::mild;
};

// Every hour is an independent cohort seeded only from community
// prevalence; new infections are never carried into later hours.
inline std::vector<VenueResult> simulate_week(const SimulationInput& input, const EpiParams& params,
                                              double severe_threshold = kDefaultSevereThreshold) {
  const double prevalence = effective_prevalence(params);
  if (input.visits.size() != input.venues.size()) {
    throw DatasetError("simulation input is not joined: venue and visit tables differ in size");
  }
  std::vector<VenueResult> results;
  results.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto& venue = input.venues[i];
    const auto& series = input.visits[i];
    if (series.venue_id != venue.venue_id) {
      throw DatasetError("visit series '" + series.venue_id + "' misaligned with venue '" + venue.venue_id + "'",
                         {venue.venue_id});
    }
    if (!venue.volume) throw DatasetError("venue '" + venue.venue_id + "' has no volume", {venue.venue_id});

    VenueResult r;
    r.venue_id = venue.venue_id;
    r.hourly_infections.reserve(series.hourly_counts.size());
    for (double n : series.hourly_counts) {
      const double c = expected_new_infections_hour(n, prevalence, params, *venue.volume);
      r.hourly_infections.push_back(c);
      r.weekly_infections += c;
    }
    r.severity = classify(r.weekly_infections, severe_threshold);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace venuerisk
