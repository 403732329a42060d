#include "uavsim/ferry.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavsim {

RosterPlan partition_rosters(std::span<const ScoredContent> eligible,
                             int roster_size) {
  if (roster_size <= 0) {
    throw std::invalid_argument("partition_rosters: roster_size must be > 0");
  }
  std::vector<ScoredContent> sorted(eligible.begin(), eligible.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredContent& a, const ScoredContent& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.id < b.id;
            });
  RosterPlan plan;
  for (std::size_t i = 0; i < sorted.size(); i += roster_size) {
    const std::size_t end = std::min(sorted.size(), i + roster_size);
    std::vector<ContentId> block;
    block.reserve(end - i);
    for (std::size_t j = i; j < end; ++j) block.push_back(sorted[j].id);
    plan.rosters.push_back(std::move(block));
  }
  return plan;
}

int select_roster(const RosterPlan& plan, std::optional<int> prev_roster,
                  double least_popular_request_interval, double tad_of_roster,
                  double ferry_revisit_interval,
                  std::span<const int> group_peers, bool* exhausted) {
  if (plan.empty()) {
    throw std::invalid_argument("select_roster: empty roster plan");
  }
  if (exhausted) *exhausted = false;
  const int n = plan.size();

  int candidate = 0;
  if (prev_roster) {
    const bool still_hot = least_popular_request_interval <=
                           std::min(tad_of_roster, ferry_revisit_interval);
    candidate = still_hot ? *prev_roster % n : (*prev_roster + 1) % n;
  }

  std::vector<char> claimed(n, 0);
  for (int peer : group_peers) {
    if (peer >= 0 && peer < n) claimed[peer] = 1;
  }
  for (int step = 0; step < n; ++step) {
    const int idx = (candidate + step) % n;
    if (!claimed[idx]) return idx;
  }
  // Group larger than the roster count: fall back to the top block.
  if (exhausted) *exhausted = true;
  return 0;
}

void refresh_ferry_cache(FerryState& state, const RosterPlan& plan,
                         std::span<const ContentId> avoid,
                         std::span<const ScoredContent> replacement_pool) {
  if (state.roster_index < 0 || state.roster_index >= plan.size()) {
    throw std::logic_error("refresh_ferry_cache: no roster selected");
  }
  const auto blocked = [&](ContentId id) {
    return std::find(avoid.begin(), avoid.end(), id) != avoid.end();
  };

  std::vector<ContentId> cache;
  std::vector<ContentId> needs_replacement;
  for (ContentId id : plan.rosters[state.roster_index]) {
    if (blocked(id)) {
      needs_replacement.push_back(id);
    } else {
      cache.push_back(id);
    }
  }

  if (!needs_replacement.empty() && !replacement_pool.empty()) {
    std::vector<ScoredContent> pool(replacement_pool.begin(),
                                    replacement_pool.end());
    std::sort(pool.begin(), pool.end(),
              [](const ScoredContent& a, const ScoredContent& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.id < b.id;
              });
    std::size_t cursor = 0;
    for (std::size_t slot = 0; slot < needs_replacement.size(); ++slot) {
      while (cursor < pool.size()) {
        const ContentId cand = pool[cursor].id;
        ++cursor;
        const bool already =
            std::find(cache.begin(), cache.end(), cand) != cache.end();
        if (!already && !blocked(cand)) {
          cache.push_back(cand);
          break;
        }
      }
      if (cursor >= pool.size()) break;  // pool exhausted, cache stays short
    }
  }

  std::sort(cache.begin(), cache.end());
  state.cache = std::move(cache);
}

} // namespace uavsim
