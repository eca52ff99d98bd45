// venuerisk command-line front end.
//
//   venuerisk simulate      --venues V --visits H --prevalence P [--out DIR]
//   venuerisk compare       --venues V --visits H --prevalence P --scenario-a A --scenario-b B
//   venuerisk hotspots      --results results.csv [--threshold T] [--top-k K]
//   venuerisk gen-synthetic --n-venues N --profile lockdown|pre_pandemic --seed S --out DIR
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "venuerisk.hpp"

namespace fs = std::filesystem;
using namespace venuerisk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct InputOptions {
  std::string venues;
  std::string visits;
  std::string params;
  AreaUnit area_unit = AreaUnit::square_meters;
  std::optional<double> prevalence;
  std::optional<double> underreport_factor;
  std::size_t bins = 30;
  std::string scale_name = "log10";
  Scale scale() const { return scale_name == "linear" ? Scale::linear : Scale::log10; }
  double threshold = kDefaultSevereThreshold;
  std::string out = "out";
};

void add_input_options(CLI::App* cmd, InputOptions& o) {
  cmd->add_option("--venues", o.venues, "Venue file (venue_id,name,category,area)")->required();
  cmd->add_option("--visits", o.visits, "Visit file (venue_id,hour,count)")->required();
  cmd->add_option("--params", o.params, "Parameter file (key = value)");
  cmd->add_option("--area-unit", o.area_unit, "Unit of the venue area column")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, AreaUnit>{{"m2", AreaUnit::square_meters}, {"ft2", AreaUnit::square_feet}}));
  cmd->add_option("--prevalence", o.prevalence,
                  "Documented prevalence fraction (required unless the params file sets documented_prevalence)");
  cmd->add_option("--underreport-factor", o.underreport_factor, "Under-reporting multiplier (default 15)");
  cmd->add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber);
  cmd->add_option("--scale", o.scale_name, "Histogram scale")->check(CLI::IsMember({"linear", "log10"}));
  cmd->add_option("--threshold", o.threshold, "Weekly infections above which a venue is severe");
  cmd->add_option("--out", o.out, "Output directory");
}

struct LoadedInputs {
  SimulationInput base;  // raw counts, volumes at the resolved ceiling height
  EpiParams params;
  report::RunManifest manifest;
};

LoadedInputs load_inputs(const InputOptions& o) {
  LoadedInputs in;
  auto& m = in.manifest;

  EpiParams params;
  if (!o.params.empty()) {
    const auto text = report::read_file(o.params);
    m.add_input(o.params, text);
    std::istringstream ss(text);
    params = merge(params, parse_params_override(ss));
  }
  if (o.prevalence) params.documented_prevalence = *o.prevalence;
  if (o.underreport_factor) params.underreport_factor = *o.underreport_factor;
  if (!params.documented_prevalence) {
    throw ArgumentError("documented prevalence is required: pass --prevalence or set documented_prevalence");
  }
  validate(params);
  in.params = params;
  m.resolved_params = params;

  const auto venue_text = report::read_file(o.venues);
  const auto visit_text = report::read_file(o.visits);
  m.add_input(o.venues, venue_text);
  m.add_input(o.visits, visit_text);
  std::istringstream vs(venue_text), hs(visit_text);
  auto venues = compute_volumes(parse_venues(vs, o.area_unit), params.ceiling_height);
  in.base = join(venues, parse_visits(hs, kHoursPerWeek), kHoursPerWeek);
  m.severe_threshold = o.threshold;
  m.timestamp = report::utc_timestamp_now();
  return in;
}

std::string manifest_file(const report::RunManifest& m) { return m.to_json().dump(2) + "\n"; }

int cmd_simulate(const InputOptions& o, double sampling_factor, const std::string& spacing) {
  auto in = load_inputs(o);
  ScenarioConfig cfg;
  cfg.name = "simulate";
  cfg.sampling_factor = sampling_factor;
  if (!spacing.empty()) {
    const double m = parse_length(spacing);
    if (!(m > 0.0)) throw ArgumentError("spacing must be positive");
    cfg.distancing = Distancing{m};
  }
  in.manifest.scenario_configs = {cfg};
  const auto hash = in.manifest.hash();

  const auto result = run_scenario(in.base, cfg, in.params, o.threshold);
  const auto weekly = weekly_values(result.results);
  const auto hist = histogram(weekly, o.bins, o.scale());

  report::write_files_atomically(o.out, {
                                            {"results.csv", report::results_csv(result.venues, result.results, hash)},
                                            {"hourly.csv", report::hourly_csv(result.results, hash)},
                                            {"histogram.csv", report::histogram_csv(hist, hash)},
                                            {"summary.json", report::summary_json(result, hist, hash)},
                                            {"manifest.json", manifest_file(in.manifest)},
                                        });
  double total = 0.0;
  for (double w : weekly) total += w;
  std::cout << "venues " << result.results.size() << "  severe " << result.severe_count << "  mild "
            << result.mild_count << "  total_expected_infections " << text::format_double(total) << "\n"
            << "wrote " << (fs::path(o.out) / "results.csv").string() << " and companions\n";
  return kExitOk;
}

int cmd_compare(const InputOptions& o, const std::string& path_a, const std::string& path_b, bool pooled) {
  auto in = load_inputs(o);
  const auto cfg_a = load_scenario_config(path_a);
  const auto cfg_b = load_scenario_config(path_b);
  in.manifest.add_input(path_a, report::read_file(path_a));
  in.manifest.add_input(path_b, report::read_file(path_b));
  for (const auto& cfg : {cfg_a, cfg_b}) {
    if (const auto* alt = std::get_if<AlternateVisitFile>(&cfg.visit_source)) {
      in.manifest.add_input(alt->path, report::read_file(alt->path));
    }
  }
  in.manifest.scenario_configs = {cfg_a, cfg_b};
  const auto hash = in.manifest.hash();

  const auto a = run_scenario(in.base, cfg_a, in.params, o.threshold);
  const auto b = run_scenario(in.base, cfg_b, in.params, o.threshold);
  bool aligned = a.results.size() == b.results.size();
  for (std::size_t i = 0; aligned && i < a.results.size(); ++i) {
    aligned = a.results[i].venue_id == b.results[i].venue_id;
  }
  if (!aligned) throw DatasetError("scenarios were run over different venue tables");

  const auto wa = weekly_values(a.results);
  const auto wb = weekly_values(b.results);
  const auto cmp = compare_samples(wa, wb, o.bins, o.scale(), pooled);

  report::write_files_atomically(o.out, {
                                            {"comparison.json", report::comparison_json(a, b, cmp, hash)},
                                            {"histogram_a.csv", report::histogram_csv(cmp.histogram_a, hash)},
                                            {"histogram_b.csv", report::histogram_csv(cmp.histogram_b, hash)},
                                            {"results_a.csv", report::results_csv(a.venues, a.results, hash)},
                                            {"results_b.csv", report::results_csv(b.venues, b.results, hash)},
                                            {"manifest.json", manifest_file(in.manifest)},
                                        });
  std::cout << (pooled ? "pooled" : "welch") << " t " << text::format_double(cmp.t_stat) << "  df "
            << text::format_double(cmp.degrees_of_freedom) << "  p " << text::format_double(cmp.p_value) << "\n"
            << cfg_a.name << ": severe " << a.severe_count << "  mild " << a.mild_count << "\n"
            << cfg_b.name << ": severe " << b.severe_count << "  mild " << b.mild_count << "\n";
  return kExitOk;
}

int cmd_hotspots(const std::string& results, double threshold, std::size_t top_k, const std::string& out) {
  std::istringstream ss(report::read_file(results));
  const auto ranked = report::rank_hotspots(report::parse_results_csv(ss), threshold, top_k);
  const auto csv = report::hotspots_csv(ranked);
  if (!out.empty()) report::write_files_atomically(out, {{"hotspots.csv", csv}});
  std::cout << csv;
  return kExitOk;
}

int cmd_gen_synthetic(std::size_t n_venues, synthetic::TrafficProfile profile, std::uint64_t seed,
                      double multiplier, const std::string& out) {
  synthetic::SyntheticConfig cfg;
  cfg.pre_pandemic_multiplier = multiplier;
  const auto data = synthetic::generate(n_venues, profile, seed, cfg);
  std::ostringstream venues, visits;
  synthetic::write_venue_file(venues, data);
  synthetic::write_visit_file(visits, data);

  report::json gen;
  gen["tool_version"] = report::kToolVersion;
  gen["generator"] = {{"n_venues", n_venues},
                      {"profile", std::string(synthetic::to_string(profile))},
                      {"seed", seed},
                      {"area_min_m2", cfg.area_min},
                      {"area_max_m2", cfg.area_max},
                      {"popularity_log_mean", cfg.popularity_log_mean},
                      {"popularity_log_sd", cfg.popularity_log_sd},
                      {"pre_pandemic_multiplier", cfg.pre_pandemic_multiplier},
                      {"drinking_place_share", cfg.drinking_place_share},
                      {"diurnal", cfg.diurnal},
                      {"weekday", cfg.weekday}};
  gen["output_digests"] = {{"venues.csv", report::sha256_hex(venues.str())},
                           {"visits.csv", report::sha256_hex(visits.str())}};
  gen["manifest_sha256"] = report::sha256_hex(gen.dump());

  report::write_files_atomically(out, {{"venues.csv", venues.str()},
                                       {"visits.csv", visits.str()},
                                       {"manifest.json", gen.dump(2) + "\n"}});
  std::cout << "wrote " << data.venues.size() << " venues (" << synthetic::to_string(profile) << ", seed " << seed
            << ") to " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Venue-level airborne infection scenario simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(report::kToolVersion));

  InputOptions sim_opts;
  double sampling_factor = kDefaultSamplingFactor;
  std::string spacing;
  auto* sim = app.add_subcommand("simulate", "Expected new infections per venue for one week");
  add_input_options(sim, sim_opts);
  sim->add_option("--sampling-factor", sampling_factor, "Multiplier applied to raw visit counts")
      ->check(CLI::PositiveNumber);
  sim->add_option("--spacing", spacing, "Enforce physical distancing, e.g. 6ft or 1.8288m");

  InputOptions cmp_opts;
  std::string scenario_a, scenario_b;
  bool pooled = false;
  auto* cmp = app.add_subcommand("compare", "Compare two scenarios with a two-sample t-test");
  add_input_options(cmp, cmp_opts);
  cmp->add_option("--scenario-a", scenario_a, "Scenario config file")->required();
  cmp->add_option("--scenario-b", scenario_b, "Scenario config file")->required();
  cmp->add_flag("--pooled", pooled, "Use the pooled-variance t-test instead of Welch");

  std::string results_path, hotspot_out;
  double hotspot_threshold = kDefaultSevereThreshold;
  std::size_t top_k = 0;
  auto* hot = app.add_subcommand("hotspots", "Rank venues from a results file");
  hot->add_option("--results", results_path, "results.csv written by simulate")->required();
  hot->add_option("--threshold", hotspot_threshold, "Weekly infections above which a venue is severe");
  hot->add_option("--top-k", top_k, "Keep only the first K venues (0 = all)");
  hot->add_option("--out", hotspot_out, "Also write hotspots.csv to this directory");

  std::size_t n_venues = 1034;
  std::string profile = "lockdown";
  std::uint64_t seed = 20201102;
  double multiplier = synthetic::SyntheticConfig{}.pre_pandemic_multiplier;
  std::string gen_out = "synthetic";
  auto* gen = app.add_subcommand("gen-synthetic", "Write a seeded synthetic venue + visit dataset");
  gen->add_option("--n-venues", n_venues, "Number of venues")->check(CLI::PositiveNumber);
  gen->add_option("--profile", profile, "Traffic profile")->check(CLI::IsMember({"lockdown", "pre_pandemic"}));
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--traffic-multiplier", multiplier, "Pre-pandemic traffic relative to lockdown")
      ->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*sim) return cmd_simulate(sim_opts, sampling_factor, spacing);
    if (*cmp) return cmd_compare(cmp_opts, scenario_a, scenario_b, pooled);
    if (*hot) return cmd_hotspots(results_path, hotspot_threshold, top_k, hotspot_out);
    if (*gen) return cmd_gen_synthetic(n_venues,
                             profile == "pre_pandemic" ? synthetic::TrafficProfile::pre_pandemic
                                                       : synthetic::TrafficProfile::lockdown,
                             seed, multiplier, gen_out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
