#include "uavsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace uavsim {

namespace {

// Descending score with content id as the deterministic tie-break.
void sort_by_score_desc(std::vector<ContentId>& ids,
                        const std::vector<double>& score) {
  std::sort(ids.begin(), ids.end(), [&](ContentId a, ContentId b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
}

double mass_of(std::span<const ContentId> ids, std::span<const double> values) {
  double acc = 0.0;
  for (ContentId c : ids) acc += values[c];
  return acc;
}

} // namespace

std::vector<ContentId> SegmentedCachePlan::anchor_cache(AnchorId a) const {
  std::vector<ContentId> cache = segment1_nonexclusive;
  cache.insert(cache.end(), segment1_exclusive[a].begin(),
               segment1_exclusive[a].end());
  cache.insert(cache.end(), segment2[a].begin(), segment2[a].end());
  std::sort(cache.begin(), cache.end());
  return cache;
}

std::vector<ContentId> SegmentedCachePlan::ferried_eligible() const {
  std::vector<ContentId> out;
  for (const auto& ex : segment1_exclusive) {
    out.insert(out.end(), ex.begin(), ex.end());
  }
  for (const auto& s2 : segment2) {
    out.insert(out.end(), s2.begin(), s2.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::pair<int, int> segment_sizes(double lambda, int anchor_capacity) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw std::domain_error("segment_sizes: lambda outside [0, 1]");
  }
  const int s1 = static_cast<int>(std::floor(lambda * anchor_capacity + 0.5));
  return {s1, anchor_capacity - s1};
}

long long system_content_count(double lambda, int anchor_capacity,
                               int n_anchor) {
  const auto [s1, s2] = segment_sizes(lambda, anchor_capacity);
  return static_cast<long long>(s1) +
         static_cast<long long>(n_anchor) * static_cast<long long>(s2);
}

double content_value(double popularity, double tad, double tad_min,
                     double p_max, double kappa) {
  if (tad < tad_min || tad_min <= 0.0) {
    throw std::domain_error("content_value: tad below tad_min");
  }
  if (popularity <= 0.0 || popularity > p_max) {
    throw std::domain_error("content_value: popularity outside (0, p_max]");
  }
  return kappa * (tad_min / p_max) * (popularity / tad);
}

SegmentedCachePlan preload_anchor_caches(
    const std::vector<CommunityDemand>& profiles, double lambda,
    int anchor_capacity, double kappa,
    std::optional<std::uint64_t> shuffle_seed) {
  const int n_anchor = static_cast<int>(profiles.size());
  if (n_anchor == 0) {
    throw std::invalid_argument("preload_anchor_caches: no communities");
  }
  const int c = static_cast<int>(profiles.front().popularity.size());
  for (const auto& p : profiles) {
    if (static_cast<int>(p.popularity.size()) != c ||
        static_cast<int>(p.tad.size()) != c) {
      throw std::invalid_argument(
          "preload_anchor_caches: community demand sizes disagree");
    }
  }
  if (system_content_count(lambda, anchor_capacity, n_anchor) > c) {
    throw std::runtime_error(
        "preload_anchor_caches: infeasible capacity, system content count " +
        std::to_string(system_content_count(lambda, anchor_capacity,
                                            n_anchor)) +
        " exceeds catalog size " + std::to_string(c));
  }

  double tad_min = profiles[0].tad[0];
  double p_max = 0.0;
  for (const auto& p : profiles) {
    for (int i = 0; i < c; ++i) {
      tad_min = std::min(tad_min, p.tad[i]);
      p_max = std::max(p_max, p.popularity[i]);
    }
  }

  SegmentedCachePlan plan;
  plan.lambda = lambda;
  plan.anchor_capacity = anchor_capacity;
  plan.community_value.resize(n_anchor);
  plan.global_value.assign(c, 0.0);
  for (int a = 0; a < n_anchor; ++a) {
    auto& val = plan.community_value[a];
    val.resize(c);
    for (int i = 0; i < c; ++i) {
      val[i] = content_value(profiles[a].popularity[i], profiles[a].tad[i],
                             tad_min, p_max, kappa);
      plan.global_value[i] += val[i] / n_anchor;
    }
  }

  const auto [s1, s2] = segment_sizes(lambda, anchor_capacity);

  // Per-community top-s1 by value.
  std::vector<std::vector<ContentId>> top(n_anchor);
  std::vector<std::vector<char>> in_top(n_anchor,
                                        std::vector<char>(c, 0));
  for (int a = 0; a < n_anchor; ++a) {
    std::vector<ContentId> ids(c);
    std::iota(ids.begin(), ids.end(), 0);
    sort_by_score_desc(ids, plan.community_value[a]);
    ids.resize(s1);
    for (ContentId id : ids) in_top[a][id] = 1;
    top[a] = std::move(ids);
  }

  // Non-exclusive = in every community's top list; the rest of each top
  // list is that anchor's exclusive set.
  plan.segment1_exclusive.resize(n_anchor);
  std::vector<char> in_any_top(c, 0);
  for (ContentId id = 0; id < c; ++id) {
    bool everywhere = true;
    bool anywhere = false;
    for (int a = 0; a < n_anchor; ++a) {
      everywhere = everywhere && in_top[a][id];
      anywhere = anywhere || in_top[a][id];
    }
    in_any_top[id] = anywhere ? 1 : 0;
    if (everywhere && s1 > 0) plan.segment1_nonexclusive.push_back(id);
  }
  std::vector<char> in_ne(c, 0);
  for (ContentId id : plan.segment1_nonexclusive) in_ne[id] = 1;
  for (int a = 0; a < n_anchor; ++a) {
    for (ContentId id : top[a]) {
      if (!in_ne[id]) plan.segment1_exclusive[a].push_back(id);
    }
    std::sort(plan.segment1_exclusive[a].begin(),
              plan.segment1_exclusive[a].end());
  }

  // Segment-2: next-best contents by global value, dealt across anchors.
  std::vector<ContentId> candidates;
  for (ContentId id = 0; id < c; ++id) {
    if (!in_any_top[id]) candidates.push_back(id);
  }
  sort_by_score_desc(candidates, plan.global_value);
  const long long need = static_cast<long long>(n_anchor) * s2;
  if (static_cast<long long>(candidates.size()) < need) {
    throw std::runtime_error(
        "preload_anchor_caches: infeasible capacity, only " +
        std::to_string(candidates.size()) + " contents left for " +
        std::to_string(need) + " Segment-2 slots");
  }
  candidates.resize(static_cast<std::size_t>(need));
  if (shuffle_seed) {
    RandomStream rng(derive_seed(*shuffle_seed, 0x73656732ULL));  // "seg2"
    for (std::size_t i = candidates.size(); i > 1; --i) {
      std::swap(candidates[i - 1], candidates[rng.uniform_int(i)]);
    }
  }
  plan.segment2.resize(n_anchor);
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    plan.segment2[j % n_anchor].push_back(candidates[j]);
  }
  for (auto& s : plan.segment2) std::sort(s.begin(), s.end());
  return plan;
}

std::vector<ContentId> benchmark_ferry_load(
    const SegmentedCachePlan& plan, int ferry_capacity, AnchorId next_anchor,
    AnchorId current_anchor, std::span<const ContentId> /*current_ferry_cache*/) {
  if (next_anchor == current_anchor) {
    throw std::invalid_argument("benchmark_ferry_load: anchors must differ");
  }
  if (ferry_capacity <= 0) {
    throw std::invalid_argument("benchmark_ferry_load: capacity must be > 0");
  }
  const auto next_cache = plan.anchor_cache(next_anchor);
  std::vector<char> in_next(plan.global_value.size(), 0);
  for (ContentId id : next_cache) in_next[id] = 1;

  std::vector<ContentId> pool;
  for (ContentId id : plan.ferried_eligible()) {
    if (!in_next[id]) pool.push_back(id);
  }
  sort_by_score_desc(pool, plan.community_value[next_anchor]);
  if (static_cast<int>(pool.size()) > ferry_capacity) {
    pool.resize(ferry_capacity);
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

double t_cond(const UpperBoundParams& p) {
  const double visits = static_cast<double>(p.ferry_group_size) * p.n_anchor /
                        static_cast<double>(p.n_ferry);
  return ((visits - 1.0) * p.hover_ratio + visits * p.transit_ratio) *
         p.cycle_time;
}

double p_access(const UpperBoundParams& p) {
  if (p.mean_tad >= t_cond(p)) return 1.0;
  const double numer =
      p.n_ferry * (p.hover_ratio * p.cycle_time + p.mean_tad);
  const double denom = static_cast<double>(p.ferry_group_size) * p.n_anchor *
                       (p.hover_ratio + p.transit_ratio) * p.cycle_time;
  return std::clamp(numer / denom, 0.0, 1.0);
}

double p_mf(const SegmentedCachePlan& plan, std::span<const double> values,
            AnchorId anchor) {
  const auto eligible = plan.ferried_eligible();
  if (eligible.empty()) return 0.0;
  const double denom = mass_of(eligible, values);
  if (denom <= 0.0) {
    throw std::runtime_error(
        "p_mf: degenerate plan, ferried-eligible contents carry no value");
  }
  double numer = mass_of(plan.segment1_nonexclusive, values) +
                 mass_of(plan.segment1_exclusive[anchor], values);
  return std::clamp(numer / denom, 0.0, 1.0);
}

double p_a(const SegmentedCachePlan& plan, std::span<const double> values,
           AnchorId anchor) {
  double total = 0.0;
  for (double v : values) total += v;
  if (total <= 0.0) return 0.0;
  return std::clamp(mass_of(plan.anchor_cache(anchor), values) / total, 0.0,
                    1.0);
}

double availability_upper_bound(const SegmentedCachePlan& plan,
                                std::span<const double> values,
                                const UpperBoundParams& p, AnchorId anchor) {
  const double bound =
      p_a(plan, values, anchor) + p_access(p) * p_mf(plan, values, anchor);
  return std::clamp(bound, 0.0, 1.0);
}

} // namespace uavsim
