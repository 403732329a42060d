#include "uavsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <stdexcept>

#include "uavsim/config.hpp"

namespace uavsim {

namespace {

constexpr int kSmoothingWindow = 9;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

double tail_mean(std::span<const double> xs, double fraction) {
  if (xs.empty()) return 0.0;
  const std::size_t n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(xs.size() * fraction)));
  return mean(xs.subspan(xs.size() - n));
}

double head_mean(std::span<const double> xs, double fraction) {
  if (xs.empty()) return 0.0;
  const std::size_t n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(xs.size() * fraction)));
  return mean(xs.subspan(0, n));
}

void write_file(const std::string& path, const std::string& content,
                std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write output file '" + path + "'");
  }
  out << content;
  written.push_back(path);
}

struct RunOutput {
  SimResult result;
  RunSeries series;
};

RunOutput run_one(SimConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  RunOutput out;
  out.result = run_simulation(cfg);
  std::vector<double> bounds;
  for (const auto& c : out.result.communities) bounds.push_back(c.bound);
  out.series = collapse_records(out.result.records, cfg.n_anchor, bounds);
  return out;
}

} // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::custom: return "custom";
    case Scenario::latency_sweep: return "latency_sweep";
    case Scenario::policy_evolution: return "policy_evolution";
    case Scenario::preference_shift: return "preference_shift";
    case Scenario::access_delay: return "access_delay";
    case Scenario::cdo_convergence: return "cdo_convergence";
    case Scenario::bound_only: return "bound_only";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& name) {
  for (Scenario s :
       {Scenario::custom, Scenario::latency_sweep, Scenario::policy_evolution,
        Scenario::preference_shift, Scenario::access_delay,
        Scenario::cdo_convergence, Scenario::bound_only}) {
    if (scenario_name(s) == name) return s;
  }
  throw std::runtime_error("unknown scenario '" + name + "'");
}

RunSeries collapse_records(const std::vector<EpochRecord>& records,
                           int n_anchor, const std::vector<double>& bounds) {
  std::map<std::int64_t, std::vector<const EpochRecord*>> by_epoch;
  for (const auto& r : records) by_epoch[r.epoch].push_back(&r);

  // Running tallies seen at each community's previous epoch.
  std::vector<std::int64_t> prev_hits(n_anchor, 0), prev_reqs(n_anchor, 0),
      prev_downloads(n_anchor, 0);

  RunSeries series;
  for (const auto& [epoch, rows] : by_epoch) {
    if (static_cast<int>(rows.size()) < n_anchor) continue;  // incomplete tail
    double avail = 0.0, rel = 0.0, cd = 0.0, delay = 0.0, downloads = 0.0;
    double time = 0.0;
    std::vector<double> per_anchor;
    for (const EpochRecord* r : rows) {
      const int n = r->community;
      const std::int64_t wh = r->hits - prev_hits[n];
      const std::int64_t wr = r->requests - prev_reqs[n];
      const std::int64_t wd = r->downloads - prev_downloads[n];
      prev_hits[n] = r->hits;
      prev_reqs[n] = r->requests;
      prev_downloads[n] = r->downloads;

      const double w_avail =
          wr > 0 ? static_cast<double>(wh) / static_cast<double>(wr) : 0.0;
      avail += w_avail;
      rel += n < static_cast<int>(bounds.size()) && bounds[n] > 0.0
                 ? w_avail / bounds[n]
                 : 0.0;
      cd += r->cdo;
      delay += r->mean_access_delay;
      downloads += static_cast<double>(wd);
      time = std::max(time, r->time);
      per_anchor.push_back(w_avail);
    }
    const double n = static_cast<double>(rows.size());
    series.availability.push_back({time, avail / n});
    series.relative.push_back(rel / n);
    series.cdo.push_back(cd / n);
    series.delay.push_back(delay / n);
    series.downloads.push_back(downloads / n);
    series.fairness_sigma.push_back(stddev(per_anchor));
  }
  return series;
}

std::vector<SeriesPoint> smooth_series(const std::vector<SeriesPoint>& series,
                                       int window) {
  std::vector<SeriesPoint> out(series.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += series[i].value;
    if (i >= static_cast<std::size_t>(window)) acc -= series[i - window].value;
    const double n = std::min<std::size_t>(i + 1, window);
    out[i] = {series[i].time, acc / static_cast<double>(n)};
  }
  return out;
}

std::string epoch_csv(const std::vector<EpochRecord>& records) {
  std::string out =
      "epoch,time,community,hits,requests,availability,relative_availability,"
      "mean_access_delay,downloads,cdo\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf),
                  "%lld,%.3f,%d,%lld,%lld,%.6f,%.6f,%.6f,%lld,%.6f\n",
                  static_cast<long long>(r.epoch), r.time, r.community,
                  static_cast<long long>(r.hits),
                  static_cast<long long>(r.requests), r.availability,
                  r.relative_availability, r.mean_access_delay,
                  static_cast<long long>(r.downloads), r.cdo);
    out += buf;
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const SimConfig& base) {
  if (spec.seeds.empty()) {
    throw std::runtime_error("experiment spec requires at least one seed");
  }
  SimConfig cfg = base;
  for (const auto& o : spec.overrides) apply_override(cfg, o);

  std::filesystem::create_directories(spec.output_dir);
  ExperimentResult result;
  const std::string prefix =
      spec.output_dir + "/" + scenario_name(spec.scenario);

  if (spec.scenario == Scenario::bound_only) {
    const auto reports = compute_bounds(cfg);
    std::string csv =
        "community,p_a,p_mf,p_access,t_cond,mean_tad,availability_upper_bound\n";
    for (const auto& r : reports) {
      csv += std::to_string(r.community) + "," + format_double(r.p_a) + "," +
             format_double(r.p_mf) + "," + format_double(r.p_access) + "," +
             format_double(r.t_cond) + "," + format_double(r.mean_tad) + "," +
             format_double(r.bound) + "\n";
    }
    write_file(prefix + "_bound.csv", csv, result.files_written);
    return result;
  }

  // Variants: (label, config) pairs per scenario.
  std::vector<std::pair<std::string, SimConfig>> variants;
  const auto add_policy = [&](Policy p) {
    SimConfig v = cfg;
    v.policy = p;
    variants.emplace_back(policy_name(p), v);
  };
  switch (spec.scenario) {
    case Scenario::custom:
      variants.emplace_back(policy_name(cfg.policy), cfg);
      break;
    case Scenario::latency_sweep:
      for (int latency : {0, 2, 10}) {
        SimConfig v = cfg;
        v.policy = Policy::fedmab_selective;
        v.federation.latency_threshold = latency;
        variants.emplace_back("latency_" + std::to_string(latency), v);
      }
      break;
    case Scenario::policy_evolution:
      for (Policy p : {Policy::random, Policy::topk_mab,
                       Policy::topk_mab_selective, Policy::fedmab,
                       Policy::fedmab_selective, Policy::benchmark_value}) {
        add_policy(p);
      }
      break;
    case Scenario::preference_shift: {
      SimConfig shifted = cfg;
      if (shifted.shift_time <= 0.0) {
        shifted.shift_time = shifted.duration / 2.0;
      }
      for (Policy p : {Policy::topk_mab, Policy::fedmab_selective}) {
        SimConfig v = shifted;
        v.policy = p;
        variants.emplace_back(policy_name(p), v);
      }
      break;
    }
    case Scenario::access_delay:
      for (Policy p : {Policy::topk_mab, Policy::topk_mab_selective,
                       Policy::fedmab_selective}) {
        add_policy(p);
      }
      break;
    case Scenario::cdo_convergence:
      for (Policy p : {Policy::topk_mab, Policy::fedmab_selective}) {
        add_policy(p);
      }
      break;
    case Scenario::bound_only:
      break;  // handled above
  }

  // Replications are independent; run them concurrently and aggregate in
  // (variant, seed) order.
  std::vector<std::vector<RunOutput>> outputs(variants.size());
  {
    std::vector<std::future<RunOutput>> futures;
    futures.reserve(variants.size() * spec.seeds.size());
    for (const auto& [label, vcfg] : variants) {
      for (std::uint64_t seed : spec.seeds) {
        futures.push_back(std::async(std::launch::async, run_one, vcfg, seed));
      }
    }
    std::size_t idx = 0;
    for (std::size_t v = 0; v < variants.size(); ++v) {
      outputs[v].reserve(spec.seeds.size());
      for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
        outputs[v].push_back(futures[idx++].get());
      }
    }
  }

  std::string summary_csv =
      "scenario,variant,seeds,converged_availability,"
      "converged_availability_std,converged_relative,converged_cdo,"
      "first_epoch_cdo,early_availability,mean_access_delay,fairness_sigma,"
      "downloads_per_epoch,psi,chi,zeta_cross\n";

  for (std::size_t v = 0; v < variants.size(); ++v) {
    const auto& label = variants[v].first;
    const SimConfig& vcfg = variants[v].second;
    VariantSummary sum;
    sum.variant = label;
    sum.seeds = static_cast<int>(spec.seeds.size());

    std::vector<double> conv_avail, conv_rel, conv_cdo, first_cdo, early_avail,
        conv_delay, conv_sigma, conv_downloads, psis, chis, zetas;
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
      const RunOutput& run = outputs[v][s];
      write_file(prefix + "_" + label + "_seed" +
                     std::to_string(spec.seeds[s]) + ".csv",
                 epoch_csv(run.result.records), result.files_written);

      std::vector<double> avail;
      for (const auto& p : run.series.availability) avail.push_back(p.value);
      conv_avail.push_back(tail_mean(avail, 0.2));
      conv_rel.push_back(tail_mean(run.series.relative, 0.2));
      conv_cdo.push_back(tail_mean(run.series.cdo, 0.2));
      first_cdo.push_back(run.series.cdo.empty() ? 0.0 : run.series.cdo.front());
      early_avail.push_back(head_mean(avail, 0.1));
      conv_delay.push_back(tail_mean(run.series.delay, 0.2));
      conv_downloads.push_back(tail_mean(run.series.downloads, 0.2));
      // Spread across anchors, averaged over a trailing window of at
      // most 150 epochs.
      const auto& sig = run.series.fairness_sigma;
      const std::size_t win = std::min<std::size_t>(sig.size(), 150);
      conv_sigma.push_back(win == 0 ? 0.0
                                    : mean(std::span<const double>(sig).subspan(
                                          sig.size() - win)));
    }

    if (spec.scenario == Scenario::preference_shift) {
      // Reactivity against the other policy's series, seed by seed.
      const std::size_t baseline_v = v == 0 ? 1 : 0;
      for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
        const auto own =
            smooth_series(outputs[v][s].series.availability, kSmoothingWindow);
        const auto base_series = smooth_series(
            outputs[baseline_v][s].series.availability, kSmoothingWindow);
        const double tau = vcfg.duration - vcfg.shift_time;
        const auto rep = reactivity(own, vcfg.shift_time, base_series, tau);
        psis.push_back(rep.psi);
        chis.push_back(rep.chi);
        zetas.push_back(rep.zeta_cross);
      }
    }

    sum.converged_availability = mean(conv_avail);
    sum.converged_availability_std = stddev(conv_avail);
    sum.converged_relative = mean(conv_rel);
    sum.converged_cdo = mean(conv_cdo);
    sum.first_epoch_cdo = mean(first_cdo);
    sum.early_availability = mean(early_avail);
    sum.mean_access_delay = mean(conv_delay);
    sum.fairness_sigma = mean(conv_sigma);
    sum.downloads_per_epoch = mean(conv_downloads);
    sum.psi = mean(psis);
    sum.chi = mean(chis);
    sum.zeta_cross = mean(zetas);
    result.variants.push_back(sum);

    summary_csv += scenario_name(spec.scenario) + "," + label + "," +
                   std::to_string(sum.seeds) + "," +
                   format_double(sum.converged_availability) + "," +
                   format_double(sum.converged_availability_std) + "," +
                   format_double(sum.converged_relative) + "," +
                   format_double(sum.converged_cdo) + "," +
                   format_double(sum.first_epoch_cdo) + "," +
                   format_double(sum.early_availability) + "," +
                   format_double(sum.mean_access_delay) + "," +
                   format_double(sum.fairness_sigma) + "," +
                   format_double(sum.downloads_per_epoch) + "," +
                   format_double(sum.psi) + "," + format_double(sum.chi) + "," +
                   format_double(sum.zeta_cross) + "\n";
  }

  write_file(prefix + "_summary.csv", summary_csv, result.files_written);
  return result;
}

} // namespace uavsim
