#pragma once

#include <string>
#include <vector>

#include "uavsim/metrics.hpp"
#include "uavsim/simkernel.hpp"

namespace uavsim {

// Scenario presets mirroring the evaluation families: a controlled-latency
// sweep, the policy comparison, a mid-run preference shift, access-delay
// and CDO convergence series, plus the analytical bound on its own.
enum class Scenario {
  custom,
  latency_sweep,
  policy_evolution,
  preference_shift,
  access_delay,
  cdo_convergence,
  bound_only,
};

std::string scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);

struct ExperimentSpec {
  Scenario scenario = Scenario::custom;
  std::vector<std::string> overrides;  // key=value applied onto the config
  std::vector<std::uint64_t> seeds = {1};
  std::string output_dir = ".";
};

// Aggregates of one variant (policy or latency setting) across seeds.
// "Converged" means the mean over the last 20% of epochs; "early" the
// first 10%.
struct VariantSummary {
  std::string variant;
  int seeds = 0;
  double converged_availability = 0.0;
  double converged_availability_std = 0.0;  // across seeds
  double converged_relative = 0.0;
  double converged_cdo = 0.0;
  double first_epoch_cdo = 0.0;
  double early_availability = 0.0;
  double mean_access_delay = 0.0;  // converged window
  double fairness_sigma = 0.0;     // availability spread across anchors
  double downloads_per_epoch = 0.0;
  // Post-shift reactivity, seed-averaged (preference_shift only).
  double psi = 0.0;
  double chi = 0.0;
  double zeta_cross = 0.0;
};

struct ExperimentResult {
  std::vector<VariantSummary> variants;
  std::vector<std::string> files_written;
};

// Runs every (variant, seed) simulation of the scenario, writes one epoch
// CSV per pair plus summary.csv into output_dir, and returns the
// aggregates. Identical inputs produce identical bytes.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const SimConfig& base);

// Per-epoch series of one run, averaged across communities. The CSV rows
// carry running tallies, so windowed availability comes from differencing
// consecutive rows of each community.
struct RunSeries {
  std::vector<SeriesPoint> availability;  // windowed, time-indexed
  std::vector<double> relative;           // windowed availability / bound
  std::vector<double> cdo;
  std::vector<double> delay;
  std::vector<double> fairness_sigma;
  std::vector<double> downloads;          // windowed, per community mean
};

RunSeries collapse_records(const std::vector<EpochRecord>& records,
                           int n_anchor, const std::vector<double>& bounds);

// Trailing-window moving average used before reactivity detection.
std::vector<SeriesPoint> smooth_series(const std::vector<SeriesPoint>& series,
                                       int window);

std::string epoch_csv(const std::vector<EpochRecord>& records);

} // namespace uavsim
