#include "uavsim/simkernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>

#include "uavsim/bandit.hpp"
#include "uavsim/ferry.hpp"
#include "uavsim/oracle.hpp"

namespace uavsim {

std::string policy_name(Policy p) {
  switch (p) {
    case Policy::random: return "random";
    case Policy::benchmark_value: return "benchmark_value";
    case Policy::topk_mab: return "topk_mab";
    case Policy::topk_mab_selective: return "topk_mab_selective";
    case Policy::fedmab: return "fedmab";
    case Policy::fedmab_selective: return "fedmab_selective";
  }
  return "unknown";
}

Policy parse_policy(const std::string& name) {
  for (Policy p : {Policy::random, Policy::benchmark_value, Policy::topk_mab,
                   Policy::topk_mab_selective, Policy::fedmab,
                   Policy::fedmab_selective}) {
    if (policy_name(p) == name) return p;
  }
  throw std::runtime_error("unknown policy '" + name + "'");
}

bool policy_learns(Policy p) {
  return p == Policy::topk_mab || p == Policy::topk_mab_selective ||
         p == Policy::fedmab || p == Policy::fedmab_selective;
}

bool policy_federates(Policy p) {
  return p == Policy::fedmab || p == Policy::fedmab_selective;
}

bool policy_selective(Policy p) {
  return p == Policy::topk_mab_selective || p == Policy::fedmab_selective;
}

std::pair<double, double> adjusted_times(const SimConfig& cfg) {
  const double hover = cfg.hover_ratio * cfg.trajectory_period;
  const double transit = cfg.transit_ratio * cfg.trajectory_period;
  if (cfg.comm_overlap > transit) {
    throw std::runtime_error(
        "comm_overlap exceeds the transit time " + std::to_string(transit));
  }
  if (cfg.comm_overlap > 0.0 &&
      cfg.comm_overlap >= 1.0 / cfg.request_rate) {
    return {hover + cfg.comm_overlap, transit - cfg.comm_overlap};
  }
  return {hover, transit};
}

void SimConfig::validate() const {
  const auto fail = [](const std::string& what) {
    throw std::runtime_error("invalid config: " + what);
  };
  if (catalog_size <= 0) fail("catalog_size must be positive");
  if (zipf_alpha < 0.0) fail("zipf_alpha must be nonnegative");
  if (n_anchor < 1) fail("n_anchor must be at least 1");
  if (n_ferry < 1) fail("n_ferry must be at least 1");
  if (anchor_capacity <= 0) fail("anchor_capacity must be positive");
  if (anchor_capacity > catalog_size) {
    fail("anchor_capacity exceeds catalog_size");
  }
  if (ferry_capacity <= 0) fail("ferry_capacity must be positive");
  if (ferry_group_size < 1 || ferry_group_size > n_ferry ||
      n_ferry % ferry_group_size != 0) {
    fail("ferry_group_size must divide n_ferry");
  }
  if (request_rate <= 0.0) fail("request_rate must be positive");
  if (hover_ratio <= 0.0 || transit_ratio <= 0.0) {
    fail("hover_ratio and transit_ratio must be positive");
  }
  if (trajectory_period <= 0.0) fail("trajectory_period must be positive");
  if (n_anchor * (hover_ratio + transit_ratio) > 1.0 + 1e-12) {
    fail("n_anchor * (hover_ratio + transit_ratio) exceeds 1");
  }
  // Cumulative UAV storage must stay below the content pool.
  const long long storage =
      static_cast<long long>(n_anchor) * anchor_capacity +
      static_cast<long long>(n_ferry) * ferry_capacity;
  if (storage >= catalog_size) {
    fail("total UAV storage " + std::to_string(storage) +
         " must be below catalog_size " + std::to_string(catalog_size));
  }
  if (lambda < 0.0 || lambda > 1.0) fail("lambda must lie in [0, 1]");
  if (kappa < 0.0 || kappa > 1.0) fail("kappa must lie in [0, 1]");
  if (learn_rate <= 0.0 || learn_rate > 1.0) {
    fail("learn_rate must lie in (0, 1]");
  }
  if (zeta_ucb < 0.0) fail("zeta_ucb must be nonnegative");
  if (epsilon0 < 0.0 || epsilon0 > 1.0) fail("epsilon0 must lie in [0, 1]");
  if (epsilon_decay <= 0.0 || epsilon_decay > 1.0) {
    fail("epsilon_decay must lie in (0, 1]");
  }
  if (epsilon_floor < 0.0 || epsilon_floor > 1.0) {
    fail("epsilon_floor must lie in [0, 1]");
  }
  if (federation.beta_decay < 0.0) fail("beta_decay must be nonnegative");
  if (federation.beta_scale <= 0.0) fail("beta_scale must be positive");
  if (federation.latency_threshold < 0) {
    fail("latency_threshold must be nonnegative");
  }
  if (swap_probability < 0.0 || swap_probability > 1.0) {
    fail("swap_probability must lie in [0, 1]");
  }
  if (tad_rule.default_ratio <= 0.0) fail("tad default ratio must be positive");
  for (const auto& r : tad_rule.overrides) {
    if (r.ratio <= 0.0) fail("tad override ratio must be positive");
    if (r.lo > r.hi) fail("tad override range is inverted");
  }
  if (comm_overlap < 0.0) fail("comm_overlap must be nonnegative");
  if (duration < 0.0) fail("duration must be nonnegative");
  if (max_epochs < 0) fail("max_epochs must be nonnegative");
  adjusted_times(*this);  // throws when comm_overlap exceeds transit
}

namespace {

enum class EventKind : int {
  request_expiry = 0,
  ferry_arrival = 1,
  request_arrival = 2,
  ferry_departure = 3,
  epoch_tick = 4,
  demand_shift = 5,
};

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::epoch_tick;
  std::int64_t entity = 0;
  std::uint64_t seq = 0;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    if (a.entity != b.entity) return a.entity > b.entity;
    return a.seq > b.seq;
  }
};

struct PendingRequest {
  std::int64_t id = 0;
  ContentId content = 0;
  double issue_time = 0.0;
  double expiry_time = 0.0;
};

// Availability record one ferry can pick up at an anchor: the served
// sets of the anchor's last completed epoch and the availability deltas
// against the epoch before it.
struct EpochInfo {
  bool valid = false;
  std::int64_t epoch = 0;
  std::vector<bool> served_any;
  std::vector<bool> served_ferry;
  double delta_avail = 0.0;
  double delta_ferry_avail = 0.0;
};

// Snapshot of one anchor as gathered by a ferry and deposited at peers.
struct PeerSnapshot {
  bool valid = false;
  std::int64_t epoch = -1;
  std::vector<double> q;
  std::vector<double> distribution;
  EpochInfo info;
};

struct AnchorRuntime {
  std::vector<ContentId> cache;  // sorted, exactly anchor_capacity entries
  std::vector<char> cache_flags;
  AgentState agent;
  PopularityEstimate popularity;
  LatencyCounter latency;
  std::vector<PendingRequest> pending;  // FIFO by issue time

  std::int64_t window_requests = 0;
  std::int64_t window_hits = 0;
  std::int64_t window_downloads = 0;
  std::int64_t window_ferry_hits = 0;
  double window_delay_sum = 0.0;
  std::vector<bool> window_served_any;
  std::vector<bool> window_served_ferry;
  double prev_avail = 0.0;
  double prev_ferry_avail = 0.0;

  EpochInfo last_epoch;
  std::vector<PeerSnapshot> peers;
  std::vector<double> prev_fed_distribution;
  int last_departed_roster = -1;
  double last_epoch_time = -1.0;

  std::int64_t total_requests = 0;
  std::int64_t total_hits = 0;
  std::int64_t total_downloads = 0;
  std::int64_t total_ferry_hits = 0;
  std::int64_t reachable_requests = 0;
  std::int64_t reachable_hits = 0;
  std::int64_t epoch_count = 0;
  double max_hit_delay = 0.0;

  RandomStream agent_rng{0};
};

struct FerryRuntime {
  FerryState state;
  std::vector<char> cache_flags;
  int at_anchor = -1;  // docked anchor, or -1 in transit
  int heading_to = 0;
  double arrival_time = -1.0;  // valid while in transit
  std::vector<PeerSnapshot> carried;
  std::vector<std::vector<ContentId>> known_caches;  // last-seen anchor caches
  std::vector<char> knows_anchor;
};

struct GroupClaims {
  double stamp = -1.0;
  std::vector<int> rosters;
  std::vector<ContentId> caches;  // union of freshly loaded group caches
};

struct DemandSetup {
  Catalog catalog;
  std::vector<CommunityProfile> profiles;
  std::vector<RequestSampler> samplers;
};

DemandSetup build_demand(const SimConfig& cfg) {
  DemandSetup setup;
  setup.catalog = make_catalog(cfg.catalog_size, cfg.zipf_alpha);
  setup.profiles.reserve(cfg.n_anchor);
  for (int n = 0; n < cfg.n_anchor; ++n) {
    CommunityProfile profile = derive_heterogeneous_profile(
        setup.catalog, cfg.swap_probability, cfg.sw_min_distance,
        derive_seed(cfg.seed, 0x50524F46ULL, static_cast<std::uint64_t>(n)));
    profile.community_id = n;
    profile.tad_rule = cfg.tad_rule;
    profile.request_rate = cfg.request_rate;
    setup.profiles.push_back(std::move(profile));
  }
  setup.samplers.reserve(cfg.n_anchor);
  for (int n = 0; n < cfg.n_anchor; ++n) {
    setup.samplers.emplace_back(setup.profiles[n], setup.catalog,
                                cfg.trajectory_period);
  }
  return setup;
}

struct PlanSetup {
  SegmentedCachePlan plan;
  std::vector<BoundReport> reports;
};

PlanSetup build_plan(const SimConfig& cfg, const DemandSetup& demand) {
  std::vector<CommunityDemand> community(cfg.n_anchor);
  for (int n = 0; n < cfg.n_anchor; ++n) {
    community[n].popularity = demand.samplers[n].popularity_by_content();
    community[n].tad.resize(cfg.catalog_size);
    for (ContentId c = 0; c < cfg.catalog_size; ++c) {
      community[n].tad[c] = demand.samplers[n].tad_seconds(c);
    }
  }
  PlanSetup setup;
  setup.plan = preload_anchor_caches(community, cfg.lambda,
                                     cfg.anchor_capacity, cfg.kappa);
  setup.reports.resize(cfg.n_anchor);
  for (int n = 0; n < cfg.n_anchor; ++n) {
    double mean_tad = 0.0;
    for (ContentId c = 0; c < cfg.catalog_size; ++c) {
      mean_tad += community[n].popularity[c] * community[n].tad[c];
    }
    UpperBoundParams params;
    params.n_anchor = cfg.n_anchor;
    params.n_ferry = cfg.n_ferry;
    params.ferry_group_size = cfg.ferry_group_size;
    params.hover_ratio = cfg.hover_ratio;
    params.transit_ratio = cfg.transit_ratio;
    params.cycle_time = cfg.trajectory_period;
    params.mean_tad = mean_tad;

    BoundReport& rep = setup.reports[n];
    rep.community = n;
    rep.mean_tad = mean_tad;
    rep.t_cond = t_cond(params);
    rep.p_access = p_access(params);
    rep.p_a = p_a(setup.plan, setup.plan.community_value[n], n);
    rep.p_mf = p_mf(setup.plan, setup.plan.community_value[n], n);
    rep.bound =
        availability_upper_bound(setup.plan, setup.plan.community_value[n],
                                 params, n);
  }
  return setup;
}

class Simulation {
 public:
  explicit Simulation(const SimConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    std::tie(hover_, transit_) = adjusted_times(cfg_);
    cycle_ = cfg_.n_anchor * (hover_ + transit_);
    init_demand();
    init_plan();
    init_anchors();
    init_ferries();
    schedule_requests();
    if (cfg_.shift_time > 0.0) {
      push_event(cfg_.shift_time, EventKind::demand_shift, 0);
    }
  }

  SimResult run();

 private:
  void init_demand();
  void init_plan();
  void init_anchors();
  void init_ferries();
  void schedule_requests();

  void push_event(double time, EventKind kind, std::int64_t entity) {
    queue_.push(Event{time, kind, entity, seq_++});
  }

  void handle_request_arrival(double now, int community);
  void handle_request(double now, const Request& req);
  void handle_expiry(double now, std::int64_t request_id);
  void handle_ferry_arrival(double now, int ferry);
  void handle_ferry_departure(double now, int ferry);
  void handle_demand_shift(double now);

  void run_epoch(double now, AnchorRuntime& anchor, int anchor_id);
  void run_federation(AnchorRuntime& anchor, int anchor_id);
  void reselect_cache(AnchorRuntime& anchor);
  void set_cache(AnchorRuntime& anchor, std::vector<ContentId> cache);
  std::vector<ContentId> learned_ranked_cache(const AnchorRuntime& anchor,
                                              int anchor_id) const;
  void load_ferry_cache(double now, FerryRuntime& ferry, int from, int to);
  void check_conservation(int anchor_id) const;

  double tad_seconds(int community, ContentId c) const {
    return samplers_[community].tad_seconds(c);
  }

  SimConfig cfg_;
  double hover_ = 0.0;
  double transit_ = 0.0;
  double cycle_ = 0.0;

  Catalog catalog_;
  std::vector<CommunityProfile> profiles_;
  std::vector<RequestSampler> samplers_;
  std::vector<RandomStream> request_rngs_;

  SegmentedCachePlan plan_;
  std::vector<double> bounds_;  // per community
  std::vector<std::vector<ContentId>> benchmark_ranked_;
  std::vector<std::vector<char>> reachable_;  // per community content flags

  std::vector<AnchorRuntime> anchors_;
  std::vector<FerryRuntime> ferries_;
  std::vector<GroupClaims> group_claims_;
  std::vector<std::vector<int>> docked_;  // sorted ferry ids per anchor

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t seq_ = 0;
  std::int64_t next_request_id_ = 0;
  // Live pending requests by id, for expiry events.
  struct LiveRequest {
    int community = 0;
    ContentId content = 0;
  };
  std::vector<std::optional<LiveRequest>> live_;

  std::vector<EpochRecord> records_;
  std::uint64_t trace_hash_ = 1469598103934665603ULL;  // FNV-1a offset
  std::int64_t total_epochs_ = 0;
};

void Simulation::init_demand() {
  DemandSetup setup = build_demand(cfg_);
  catalog_ = std::move(setup.catalog);
  profiles_ = std::move(setup.profiles);
  samplers_.clear();
  samplers_.reserve(cfg_.n_anchor);
  for (int n = 0; n < cfg_.n_anchor; ++n) {
    samplers_.emplace_back(profiles_[n], catalog_, cfg_.trajectory_period);
    request_rngs_.emplace_back(
        derive_seed(cfg_.seed, 0x52455153ULL, static_cast<std::uint64_t>(n)));
  }
}

void Simulation::init_plan() {
  DemandSetup demand;
  demand.catalog = catalog_;
  demand.profiles = profiles_;
  for (int n = 0; n < cfg_.n_anchor; ++n) {
    demand.samplers.emplace_back(demand.profiles[n], demand.catalog,
                                 cfg_.trajectory_period);
  }
  PlanSetup setup = build_plan(cfg_, demand);
  plan_ = std::move(setup.plan);

  bounds_.resize(cfg_.n_anchor);
  benchmark_ranked_.resize(cfg_.n_anchor);
  reachable_.assign(cfg_.n_anchor, std::vector<char>(cfg_.catalog_size, 0));
  for (int n = 0; n < cfg_.n_anchor; ++n) {
    bounds_[n] = setup.reports[n].bound;

    std::vector<ContentId> ids(cfg_.catalog_size);
    std::iota(ids.begin(), ids.end(), 0);
    const auto& value = plan_.community_value[n];
    std::sort(ids.begin(), ids.end(), [&](ContentId a, ContentId b) {
      if (value[a] != value[b]) return value[a] > value[b];
      return a < b;
    });
    ids.resize(cfg_.anchor_capacity);
    benchmark_ranked_[n] = std::move(ids);

    if (cfg_.n_anchor >= 2) {
      const int from = (n + 1) % cfg_.n_anchor;
      for (ContentId c :
           benchmark_ferry_load(plan_, cfg_.ferry_capacity, n, from, {})) {
        reachable_[n][c] = 1;
      }
    }
  }
}

void Simulation::init_anchors() {
  anchors_.resize(cfg_.n_anchor);
  docked_.assign(cfg_.n_anchor, {});
  for (int n = 0; n < cfg_.n_anchor; ++n) {
    AnchorRuntime& a = anchors_[n];
    a.agent = AgentState(cfg_.catalog_size);
    a.agent.learn_rate = cfg_.learn_rate;
    a.agent.zeta_ucb = cfg_.zeta_ucb;
    a.agent.epsilon = cfg_.epsilon0;
    a.agent.epsilon_decay = cfg_.epsilon_decay;
    a.agent.epsilon_floor = cfg_.epsilon_floor;
    a.agent.cache_capacity = cfg_.anchor_capacity;
    a.popularity = PopularityEstimate(cfg_.catalog_size);
    a.window_served_any.assign(cfg_.catalog_size, false);
    a.window_served_ferry.assign(cfg_.catalog_size, false);
    a.peers.resize(cfg_.n_anchor);
    a.prev_fed_distribution = a.popularity.distribution();
    a.agent_rng = RandomStream(
        derive_seed(cfg_.seed, 0x41474E54ULL, static_cast<std::uint64_t>(n)));

    if (cfg_.policy == Policy::benchmark_value) {
      set_cache(a, plan_.anchor_cache(n));
    } else {
      // Random initial load, as the learning algorithms prescribe.
      std::vector<double> zeros(cfg_.catalog_size, 0.0);
      std::vector<ContentId> ids(cfg_.catalog_size);
      std::iota(ids.begin(), ids.end(), 0);
      for (int i = 0; i < cfg_.anchor_capacity; ++i) {
        const int j = i + static_cast<int>(a.agent_rng.uniform_int(
                              static_cast<std::uint64_t>(cfg_.catalog_size - i)));
        std::swap(ids[i], ids[j]);
      }
      ids.resize(cfg_.anchor_capacity);
      set_cache(a, std::move(ids));
    }
  }
}

void Simulation::init_ferries() {
  const int groups = cfg_.n_ferry / cfg_.ferry_group_size;
  ferries_.resize(cfg_.n_ferry);
  group_claims_.resize(groups);
  const double leg = hover_ + transit_;
  for (int f = 0; f < cfg_.n_ferry; ++f) {
    FerryRuntime& ferry = ferries_[f];
    const int group = f / cfg_.ferry_group_size;
    ferry.state.ferry_id = f;
    ferry.state.group_id = group;
    ferry.cache_flags.assign(cfg_.catalog_size, 0);
    ferry.carried.resize(cfg_.n_anchor);
    ferry.known_caches.resize(cfg_.n_anchor);
    ferry.knows_anchor.assign(cfg_.n_anchor, 0);

    // Groups spread evenly along the round-robin cycle.
    const double phase = group * (cycle_ / groups);
    const int slot = static_cast<int>(phase / leg) % cfg_.n_anchor;
    const double offset = phase - std::floor(phase / leg) * leg;
    ferry.state.position = slot;
    if (offset < hover_) {
      // Hovering at `slot`, departs once the remaining hover elapses.
      ferry.at_anchor = slot;
      docked_[slot].push_back(f);
      push_event(hover_ - offset, EventKind::ferry_departure, f);
    } else {
      ferry.at_anchor = -1;
      ferry.heading_to = (slot + 1) % cfg_.n_anchor;
      ferry.arrival_time = leg - offset;
      push_event(ferry.arrival_time, EventKind::ferry_arrival, f);
    }

    // The benchmark policy preloads ferries a priori, so the system
    // starts in its steady state; learning ferries start empty.
    if (cfg_.policy == Policy::benchmark_value && cfg_.n_anchor >= 2) {
      const int target = ferry.at_anchor >= 0 ? ferry.at_anchor
                                              : ferry.heading_to;
      const int origin = (target + cfg_.n_anchor - 1) % cfg_.n_anchor;
      ferry.state.cache = benchmark_ferry_load(plan_, cfg_.ferry_capacity,
                                               target, origin, {});
      for (ContentId c : ferry.state.cache) ferry.cache_flags[c] = 1;
    }
  }
  for (auto& d : docked_) std::sort(d.begin(), d.end());
}

void Simulation::schedule_requests() {
  for (int n = 0; n < cfg_.n_anchor; ++n) {
    const double first = request_rngs_[n].exponential(cfg_.request_rate);
    push_event(first, EventKind::request_arrival, n);
  }
}

void Simulation::set_cache(AnchorRuntime& anchor,
                           std::vector<ContentId> cache) {
  std::sort(cache.begin(), cache.end());
  anchor.cache = std::move(cache);
  anchor.cache_flags.assign(cfg_.catalog_size, 0);
  for (ContentId c : anchor.cache) anchor.cache_flags[c] = 1;
  if (static_cast<int>(anchor.cache.size()) != cfg_.anchor_capacity) {
    throw std::logic_error(
        "invariant violated: anchor cache size must equal anchor_capacity");
  }
}

void Simulation::handle_request_arrival(double now, int community) {
  auto [req, next_time] = samplers_[community].sample(now, request_rngs_[community]);
  push_event(next_time, EventKind::request_arrival, community);
  handle_request(now, req);
}

void Simulation::handle_request(double now, const Request& req) {
  const int n = req.community_id;
  AnchorRuntime& anchor = anchors_[n];
  ++anchor.window_requests;
  ++anchor.total_requests;
  anchor.popularity.observe(req.content_id);
  // Reachability tallies count at resolution time, so requests still
  // pending when the run ends do not skew the accessibility law.
  const bool reachable = reachable_[n][req.content_id] != 0;

  if (anchor.cache_flags[req.content_id]) {
    ++anchor.window_hits;
    ++anchor.total_hits;
    anchor.window_served_any[req.content_id] = true;
    if (reachable) {
      ++anchor.reachable_requests;
      ++anchor.reachable_hits;
    }
    return;
  }
  // A docked ferry in range serves the request immediately.
  for (int f : docked_[n]) {
    if (ferries_[f].cache_flags[req.content_id]) {
      ++anchor.window_hits;
      ++anchor.total_hits;
      ++anchor.window_ferry_hits;
      ++anchor.total_ferry_hits;
      anchor.window_served_any[req.content_id] = true;
      anchor.window_served_ferry[req.content_id] = true;
      if (reachable) {
        ++anchor.reachable_requests;
        ++anchor.reachable_hits;
      }
      return;
    }
  }
  const std::int64_t id = next_request_id_++;
  live_.push_back(LiveRequest{n, req.content_id});
  anchor.pending.push_back(
      PendingRequest{id, req.content_id, now, now + req.tad});
  push_event(now + req.tad, EventKind::request_expiry, id);
}

void Simulation::handle_expiry(double now, std::int64_t request_id) {
  if (!live_[request_id]) return;  // already served
  const LiveRequest req = *live_[request_id];
  // Deadlines are closed intervals: a ferry arriving at this very
  // instant still serves the request, so leave it pending for that
  // arrival (arrivals order after expiries at equal times).
  for (const FerryRuntime& ferry : ferries_) {
    if (ferry.at_anchor < 0 && ferry.heading_to == req.community &&
        ferry.arrival_time == now && ferry.cache_flags[req.content]) {
      return;
    }
  }
  live_[request_id].reset();
  AnchorRuntime& anchor = anchors_[req.community];
  std::erase_if(anchor.pending,
                [&](const PendingRequest& p) { return p.id == request_id; });
  ++anchor.window_downloads;
  ++anchor.total_downloads;
  if (reachable_[req.community][req.content]) ++anchor.reachable_requests;
}

void Simulation::handle_ferry_arrival(double now, int ferry_id) {
  FerryRuntime& ferry = ferries_[ferry_id];
  const int n = ferry.heading_to;
  AnchorRuntime& anchor = anchors_[n];
  ferry.at_anchor = n;
  ferry.state.position = n;
  ferry.arrival_time = -1.0;
  docked_[n].insert(
      std::lower_bound(docked_[n].begin(), docked_[n].end(), ferry_id),
      ferry_id);

  // Serve pending requests the ferry can satisfy, oldest first.
  std::vector<PendingRequest> still_pending;
  still_pending.reserve(anchor.pending.size());
  for (const PendingRequest& p : anchor.pending) {
    if (ferry.cache_flags[p.content]) {
      if (now > p.expiry_time) {
        throw std::logic_error(
            "invariant violated: hit past the tolerable access delay");
      }
      ++anchor.window_hits;
      ++anchor.total_hits;
      ++anchor.window_ferry_hits;
      ++anchor.total_ferry_hits;
      anchor.window_delay_sum += now - p.issue_time;
      anchor.max_hit_delay = std::max(anchor.max_hit_delay, now - p.issue_time);
      anchor.window_served_any[p.content] = true;
      anchor.window_served_ferry[p.content] = true;
      if (reachable_[n][p.content]) {
        ++anchor.reachable_requests;
        ++anchor.reachable_hits;
      }
      live_[p.id].reset();
    } else {
      still_pending.push_back(p);
    }
  }
  anchor.pending = std::move(still_pending);

  // Deposit the availability and model snapshots gathered en route.
  for (int j = 0; j < cfg_.n_anchor; ++j) {
    const PeerSnapshot& snap = ferry.carried[j];
    if (snap.valid && snap.epoch > anchor.peers[j].epoch) {
      anchor.peers[j] = snap;
    }
  }

  // Co-located group members arrive at the same instant; the visit
  // counts as one learning epoch.
  if (anchor.last_epoch_time != now) {
    anchor.last_epoch_time = now;
    run_epoch(now, anchor, n);
  }
  check_conservation(n);
  push_event(now + hover_, EventKind::ferry_departure, ferry_id);
}

void Simulation::run_epoch(double now, AnchorRuntime& anchor, int anchor_id) {
  ++anchor.epoch_count;
  ++total_epochs_;
  anchor.agent.epoch = anchor.epoch_count;

  // Window ratios feed the reward deltas. Hits for requests issued in
  // the previous window land here, so the ratio may transiently top 1.
  const double avail =
      anchor.window_requests == 0
          ? 0.0
          : static_cast<double>(anchor.window_hits) /
                static_cast<double>(anchor.window_requests);
  const double ferry_avail =
      anchor.window_requests == 0
          ? 0.0
          : static_cast<double>(anchor.window_ferry_hits) /
                static_cast<double>(anchor.window_requests);
  const double delta_avail = avail - anchor.prev_avail;
  const double delta_ferry = ferry_avail - anchor.prev_ferry_avail;

  if (policy_learns(cfg_.policy)) {
    RewardInputs inputs;
    inputs.served_local = anchor.window_served_any;
    inputs.delta_local = delta_avail;
    inputs.mf_present = true;
    inputs.n_anchor = cfg_.n_anchor;
    inputs.self_anchor = anchor_id;
    inputs.served_ferry.resize(cfg_.n_anchor);
    inputs.served_global.resize(cfg_.n_anchor);
    inputs.delta_ferry.assign(cfg_.n_anchor, 0.0);
    inputs.delta_global.assign(cfg_.n_anchor, 0.0);
    for (int j = 0; j < cfg_.n_anchor; ++j) {
      if (j == anchor_id) {
        inputs.served_global[j] = anchor.window_served_any;
        inputs.delta_global[j] = delta_avail;
        continue;
      }
      const EpochInfo& info = anchor.peers[j].info;
      if (!info.valid) continue;
      inputs.served_ferry[j] = info.served_ferry;
      inputs.delta_ferry[j] = info.delta_ferry_avail;
      inputs.served_global[j] = info.served_any;
      inputs.delta_global[j] = info.delta_avail;
    }
    // The cached contents are the arms pulled this epoch.
    for (ContentId i : anchor.cache) {
      q_update(anchor.agent, i, inputs);
      anchor.agent.pull_count[i] += 1.0;
    }
    if (policy_federates(cfg_.policy)) {
      if (latency_gate(anchor.latency, cfg_.federation.latency_threshold) ==
          GateDecision::federate_and_reset) {
        run_federation(anchor, anchor_id);
      }
    }
  }

  // Counts are the running tallies; availability is their ratio.
  // Per-window series are recovered by differencing consecutive rows.
  EpochRecord rec;
  rec.epoch = anchor.epoch_count;
  rec.time = now;
  rec.community = anchor_id;
  rec.hits = anchor.total_hits;
  rec.requests = anchor.total_requests;
  rec.availability = availability(anchor.total_hits, anchor.total_requests);
  rec.relative_availability =
      bounds_[anchor_id] > 0.0 ? rec.availability / bounds_[anchor_id] : 0.0;
  rec.mean_access_delay =
      anchor.window_hits > 0
          ? anchor.window_delay_sum / static_cast<double>(anchor.window_hits)
          : 0.0;
  rec.downloads = anchor.total_downloads;
  // The record describes the cache that served this epoch; the reselect
  // below takes effect from the next window on.
  rec.cdo =
      cdo(learned_ranked_cache(anchor, anchor_id), benchmark_ranked_[anchor_id]);
  records_.push_back(rec);

  reselect_cache(anchor);

  // What the next departing ferry will pick up.
  anchor.last_epoch.valid = true;
  anchor.last_epoch.epoch = anchor.epoch_count;
  anchor.last_epoch.served_any = anchor.window_served_any;
  anchor.last_epoch.served_ferry = anchor.window_served_ferry;
  anchor.last_epoch.delta_avail = delta_avail;
  anchor.last_epoch.delta_ferry_avail = delta_ferry;

  anchor.prev_avail = avail;
  anchor.prev_ferry_avail = ferry_avail;
  anchor.window_requests = 0;
  anchor.window_hits = 0;
  anchor.window_downloads = 0;
  anchor.window_ferry_hits = 0;
  anchor.window_delay_sum = 0.0;
  std::fill(anchor.window_served_any.begin(), anchor.window_served_any.end(),
            false);
  std::fill(anchor.window_served_ferry.begin(),
            anchor.window_served_ferry.end(), false);
}

void Simulation::run_federation(AnchorRuntime& anchor, int anchor_id) {
  std::vector<std::vector<double>> estimates;
  std::vector<std::vector<double>> q_tables;
  estimates.push_back(anchor.popularity.distribution());
  q_tables.push_back(anchor.agent.q);
  for (int j = 0; j < cfg_.n_anchor; ++j) {
    if (j == anchor_id) continue;
    const PeerSnapshot& snap = anchor.peers[j];
    if (!snap.valid || snap.q.empty()) continue;
    estimates.push_back(snap.distribution);
    q_tables.push_back(snap.q);
  }
  if (estimates.size() < 2) return;  // nothing to aggregate against yet

  const auto factors = contribution_factors(0, estimates);
  const auto q_agg = aggregate_q(factors, q_tables);
  const double w1 =
      omega1(estimates[0], anchor.prev_fed_distribution, cfg_.federation);
  std::vector<double> w2(cfg_.catalog_size);
  for (ContentId i = 0; i < cfg_.catalog_size; ++i) {
    w2[i] = omega2(anchor.epoch_count, anchor.agent.q[i], cfg_.federation);
  }
  federated_update(anchor.agent.q, q_agg, w1, w2);
  anchor.prev_fed_distribution = estimates[0];
}

void Simulation::reselect_cache(AnchorRuntime& anchor) {
  if (cfg_.policy == Policy::benchmark_value) return;
  if (cfg_.policy == Policy::random) {
    std::vector<ContentId> ids(cfg_.catalog_size);
    std::iota(ids.begin(), ids.end(), 0);
    for (int i = 0; i < cfg_.anchor_capacity; ++i) {
      const int j = i + static_cast<int>(anchor.agent_rng.uniform_int(
                            static_cast<std::uint64_t>(cfg_.catalog_size - i)));
      std::swap(ids[i], ids[j]);
    }
    ids.resize(cfg_.anchor_capacity);
    set_cache(anchor, std::move(ids));
    return;
  }
  const auto scores = ucb_scores(anchor.agent);
  auto cache = select_cache_set(scores, cfg_.anchor_capacity,
                                anchor.agent.epsilon, anchor.agent_rng);
  anchor.agent.decay_epsilon();
  set_cache(anchor, std::move(cache));
}

std::vector<ContentId> Simulation::learned_ranked_cache(
    const AnchorRuntime& anchor, int anchor_id) const {
  std::vector<ContentId> ranked = anchor.cache;
  const std::vector<double>& score = cfg_.policy == Policy::benchmark_value
                                         ? plan_.community_value[anchor_id]
                                         : anchor.agent.q;
  std::sort(ranked.begin(), ranked.end(), [&](ContentId a, ContentId b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
  return ranked;
}

void Simulation::load_ferry_cache(double now, FerryRuntime& ferry, int from,
                                  int to) {
  AnchorRuntime& source = anchors_[from];
  const AnchorRuntime& dest = anchors_[to];

  if (cfg_.policy == Policy::benchmark_value) {
    ferry.state.cache = benchmark_ferry_load(
        plan_, cfg_.ferry_capacity, to, from, ferry.state.cache);
  } else {
    // Ferry-eligible contents: every cache this ferry has seen (including
    // the one it is leaving), minus the destination's cache.
    std::vector<char> eligible_flags(cfg_.catalog_size, 0);
    for (int j = 0; j < cfg_.n_anchor; ++j) {
      if (!ferry.knows_anchor[j]) continue;
      for (ContentId c : ferry.known_caches[j]) eligible_flags[c] = 1;
    }
    for (ContentId c : ferry.state.cache) eligible_flags[c] = 1;
    for (ContentId c : dest.cache) eligible_flags[c] = 0;

    if (cfg_.policy == Policy::random) {
      std::vector<ContentId> pool;
      for (ContentId c = 0; c < cfg_.catalog_size; ++c) {
        if (eligible_flags[c]) pool.push_back(c);
      }
      const int take =
          std::min<int>(cfg_.ferry_capacity, static_cast<int>(pool.size()));
      for (int i = 0; i < take; ++i) {
        const int j = i + static_cast<int>(source.agent_rng.uniform_int(
                              static_cast<std::uint64_t>(pool.size() - i)));
        std::swap(pool[i], pool[j]);
      }
      pool.resize(take);
      std::sort(pool.begin(), pool.end());
      ferry.state.cache = std::move(pool);
    } else {
      std::vector<ScoredContent> eligible;
      for (ContentId c = 0; c < cfg_.catalog_size; ++c) {
        if (eligible_flags[c]) eligible.push_back({c, source.agent.q[c]});
      }
      const RosterPlan roster_plan =
          partition_rosters(eligible, cfg_.ferry_capacity);
      if (roster_plan.empty()) {
        ferry.state.cache.clear();
        ferry.state.roster_index = -1;
      } else {
        std::vector<ContentId> avoid = dest.cache;
        int roster = 0;
        if (policy_selective(cfg_.policy)) {
          GroupClaims& claims = group_claims_[ferry.state.group_id];
          if (claims.stamp != now) {
            claims.stamp = now;
            claims.rosters.clear();
            claims.caches.clear();
          }
          std::optional<int> prev;
          if (source.last_departed_roster >= 0) {
            prev = source.last_departed_roster % roster_plan.size();
          }
          double interval = std::numeric_limits<double>::infinity();
          double roster_tad = 0.0;
          if (prev) {
            const auto& block = roster_plan.rosters[*prev];
            const ContentId least = block.back();
            const auto dist = source.popularity.distribution();
            interval = 1.0 / (cfg_.request_rate * dist[least]);
            roster_tad = tad_seconds(from, least);
          }
          roster = select_roster(roster_plan, prev, interval, roster_tad,
                                 cycle_, claims.rosters);
          claims.rosters.push_back(roster);
          avoid.insert(avoid.end(), claims.caches.begin(),
                       claims.caches.end());
        }
        ferry.state.roster_index = roster;
        std::vector<ScoredContent> pool;
        for (ContentId c : source.cache) {
          pool.push_back({c, source.agent.q[c]});
        }
        refresh_ferry_cache(ferry.state, roster_plan, avoid, pool);
        if (policy_selective(cfg_.policy)) {
          GroupClaims& claims = group_claims_[ferry.state.group_id];
          claims.caches.insert(claims.caches.end(), ferry.state.cache.begin(),
                               ferry.state.cache.end());
        }
        source.last_departed_roster = roster;
      }
    }
  }
  if (static_cast<int>(ferry.state.cache.size()) > cfg_.ferry_capacity) {
    throw std::logic_error(
        "invariant violated: ferry cache exceeds ferry_capacity");
  }
  ferry.cache_flags.assign(cfg_.catalog_size, 0);
  for (ContentId c : ferry.state.cache) ferry.cache_flags[c] = 1;
}

void Simulation::handle_ferry_departure(double now, int ferry_id) {
  FerryRuntime& ferry = ferries_[ferry_id];
  const int from = ferry.at_anchor;
  if (from < 0) {
    throw std::logic_error("invariant violated: departure while in transit");
  }
  AnchorRuntime& source = anchors_[from];

  // Snapshot the anchor's state for later deposits.
  if (source.epoch_count > 0) {
    PeerSnapshot snap;
    snap.valid = true;
    snap.epoch = source.epoch_count;
    snap.info = source.last_epoch;
    snap.distribution = source.popularity.distribution();
    if (policy_federates(cfg_.policy)) {
      snap.q = source.agent.q;
    }
    ferry.carried[from] = std::move(snap);
  }
  ferry.known_caches[from] = source.cache;
  ferry.knows_anchor[from] = 1;

  const int to = (from + 1) % cfg_.n_anchor;
  if (to != from) {
    load_ferry_cache(now, ferry, from, to);
  } else {
    ferry.state.cache.clear();  // single-anchor system ferries run empty
    ferry.cache_flags.assign(cfg_.catalog_size, 0);
  }

  auto& dock = docked_[from];
  dock.erase(std::find(dock.begin(), dock.end(), ferry_id));
  ferry.at_anchor = -1;
  ferry.heading_to = to;
  ferry.arrival_time = now + transit_;
  push_event(ferry.arrival_time, EventKind::ferry_arrival, ferry_id);
}

void Simulation::handle_demand_shift(double now) {
  (void)now;
  const double alpha =
      cfg_.shift_zipf_alpha >= 0.0 ? cfg_.shift_zipf_alpha : cfg_.zipf_alpha;
  catalog_ = make_catalog(cfg_.catalog_size, alpha);
  for (int n = 0; n < cfg_.n_anchor; ++n) {
    CommunityProfile profile = derive_heterogeneous_profile(
        catalog_, cfg_.shift_swap_probability, 0.0,
        derive_seed(cfg_.seed, 0x53484946ULL, static_cast<std::uint64_t>(n)));
    profile.community_id = n;
    profile.tad_rule = cfg_.tad_rule;
    profile.request_rate = cfg_.request_rate;
    profiles_[n] = std::move(profile);
    samplers_[n] = RequestSampler(profiles_[n], catalog_,
                                  cfg_.trajectory_period);
  }
}

void Simulation::check_conservation(int anchor_id) const {
  const AnchorRuntime& a = anchors_[anchor_id];
  const std::int64_t accounted = a.total_hits + a.total_downloads +
                                 static_cast<std::int64_t>(a.pending.size());
  if (accounted != a.total_requests) {
    throw std::logic_error(
        "invariant violated: hits + downloads + pending != requests at "
        "community " +
        std::to_string(anchor_id));
  }
}

SimResult Simulation::run() {
  while (!queue_.empty()) {
    const Event ev = queue_.top();
    if (ev.time > cfg_.duration) break;
    queue_.pop();

    trace_hash_ ^= std::bit_cast<std::uint64_t>(ev.time);
    trace_hash_ *= 1099511628211ULL;
    trace_hash_ ^= static_cast<std::uint64_t>(ev.kind) * 31 +
                   static_cast<std::uint64_t>(ev.entity);
    trace_hash_ *= 1099511628211ULL;

    switch (ev.kind) {
      case EventKind::request_expiry:
        handle_expiry(ev.time, ev.entity);
        break;
      case EventKind::ferry_arrival:
        handle_ferry_arrival(ev.time, static_cast<int>(ev.entity));
        break;
      case EventKind::request_arrival:
        handle_request_arrival(ev.time, static_cast<int>(ev.entity));
        break;
      case EventKind::ferry_departure:
        handle_ferry_departure(ev.time, static_cast<int>(ev.entity));
        break;
      case EventKind::epoch_tick:
        break;  // reserved; epochs ride on ferry arrivals
      case EventKind::demand_shift:
        handle_demand_shift(ev.time);
        break;
    }
    if (cfg_.max_epochs > 0) {
      bool all_done = true;
      for (const auto& a : anchors_) {
        all_done = all_done && a.epoch_count >= cfg_.max_epochs;
      }
      if (all_done) break;
    }
  }

  SimResult result;
  result.records = std::move(records_);
  result.trace_hash = trace_hash_;
  result.total_epochs = total_epochs_;
  result.communities.resize(cfg_.n_anchor);
  for (int n = 0; n < cfg_.n_anchor; ++n) {
    check_conservation(n);
    const AnchorRuntime& a = anchors_[n];
    CommunitySummary& s = result.communities[n];
    s.requests = a.total_requests;
    s.hits = a.total_hits;
    s.downloads = a.total_downloads;
    s.ferry_hits = a.total_ferry_hits;
    s.reachable_requests = a.reachable_requests;
    s.reachable_hits = a.reachable_hits;
    s.availability = availability(a.total_hits, a.total_requests);
    s.bound = bounds_[n];
    s.max_hit_delay = a.max_hit_delay;
    s.epochs = a.epoch_count;
  }
  for (const auto& f : ferries_) {
    result.ferry_caches.push_back(f.state.cache);
    result.ferry_rosters.push_back(f.state.roster_index);
    result.ferry_groups.push_back(f.state.group_id);
  }
  for (const auto& a : anchors_) {
    result.anchor_caches.push_back(a.cache);
    result.anchor_q.push_back(a.agent.q);
  }
  return result;
}

} // namespace

SimResult run_simulation(const SimConfig& config) {
  Simulation sim(config);
  return sim.run();
}

std::vector<BoundReport> compute_bounds(const SimConfig& config) {
  config.validate();
  const DemandSetup demand = build_demand(config);
  return build_plan(config, demand).reports;
}

} // namespace uavsim
