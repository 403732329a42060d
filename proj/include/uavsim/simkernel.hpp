#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavsim/content_demand.hpp"
#include "uavsim/federation.hpp"
#include "uavsim/metrics.hpp"

namespace uavsim {

enum class Policy {
  random,
  benchmark_value,
  topk_mab,
  topk_mab_selective,
  fedmab,
  fedmab_selective,
};

std::string policy_name(Policy p);
Policy parse_policy(const std::string& name);

bool policy_learns(Policy p);
bool policy_federates(Policy p);
bool policy_selective(Policy p);

struct SimConfig {
  int catalog_size = 2000;
  double zipf_alpha = 0.4;
  int n_anchor = 4;
  int n_ferry = 8;
  int ferry_group_size = 1;
  int anchor_capacity = 200;
  int ferry_capacity = 25;
  double request_rate = 1.0;  // requests per second per community
  double hover_ratio = 1.0 / 6.0;
  double transit_ratio = 1.0 / 12.0;
  double trajectory_period = 600.0;  // seconds
  Policy policy = Policy::fedmab_selective;
  double lambda = 0.5;  // storage segmentation factor
  double kappa = 1.0;   // value scale of the benchmark policy

  double learn_rate = 0.1;
  double zeta_ucb = 2.0;
  double epsilon0 = 0.3;
  double epsilon_decay = 0.99;
  double epsilon_floor = 0.01;
  FederationConfig federation;

  TadRule tad_rule;
  double swap_probability = 0.0;
  double sw_min_distance = 0.0;

  double shift_time = 0.0;  // demand shift instant; 0 disables
  double shift_swap_probability = 0.5;
  double shift_zipf_alpha = -1.0;  // < 0 keeps the base alpha

  double comm_overlap = 0.0;  // lateral-link overlap, seconds

  double duration = 25000.0;    // seconds of simulated time
  std::int64_t max_epochs = 0;  // per-anchor epoch budget; 0 = none
  std::uint64_t seed = 1;

  // Throws std::runtime_error naming the violated invariant.
  void validate() const;
};

// Effective (hover, transit) seconds after the lateral-link overlap
// adjustment; their sum always equals the unadjusted sum.
std::pair<double, double> adjusted_times(const SimConfig& cfg);

struct CommunitySummary {
  std::int64_t requests = 0;
  std::int64_t hits = 0;
  std::int64_t downloads = 0;
  std::int64_t ferry_hits = 0;
  // Requests for contents a benchmark ferry would carry toward this
  // community (used to check the accessibility law).
  std::int64_t reachable_requests = 0;
  std::int64_t reachable_hits = 0;
  double availability = 0.0;
  double bound = 0.0;  // analytical availability upper bound
  double max_hit_delay = 0.0;
  std::int64_t epochs = 0;
};

struct SimResult {
  std::vector<EpochRecord> records;
  std::vector<CommunitySummary> communities;
  std::uint64_t trace_hash = 0;
  std::int64_t total_epochs = 0;
  // Final UAV state, for invariant checks.
  std::vector<std::vector<ContentId>> ferry_caches;
  std::vector<int> ferry_rosters;
  std::vector<int> ferry_groups;
  std::vector<std::vector<ContentId>> anchor_caches;
  std::vector<std::vector<double>> anchor_q;
};

// Runs the full event loop: Poisson request streams per community,
// ferries on a round-robin trajectory, deadline-expiry fallback
// downloads, learning epochs at ferry arrivals. Deterministic for a
// fixed (config, seed).
SimResult run_simulation(const SimConfig& config);

// Analytical availability bound and its components for each community
// under the config's benchmark layout.
struct BoundReport {
  AnchorId community = 0;
  double p_a = 0.0;
  double p_mf = 0.0;
  double p_access = 0.0;
  double t_cond = 0.0;
  double mean_tad = 0.0;
  double bound = 0.0;
};

std::vector<BoundReport> compute_bounds(const SimConfig& config);

} // namespace uavsim
