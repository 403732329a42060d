#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uavsim/content_demand.hpp"

namespace uavsim {

// Ferry-eligible contents chunked into cache-sized blocks of descending
// score, so co-located ferries can carry disjoint blocks.
struct RosterPlan {
  std::vector<std::vector<ContentId>> rosters;

  bool empty() const { return rosters.empty(); }
  int size() const { return static_cast<int>(rosters.size()); }
};

// A scored content, as known to the anchor a ferry departs from.
struct ScoredContent {
  ContentId id = 0;
  double score = 0.0;
};

// Sorts eligible contents by descending score (ties to the lower id) and
// chunks them into blocks of roster_size; the last block may be short.
RosterPlan partition_rosters(std::span<const ScoredContent> eligible,
                             int roster_size);

// Roster choice for a departing ferry. Keeps the previous ferry's roster
// while its least popular content is still in demand (expected request
// interval within both its deadline and the ferry revisit interval),
// otherwise advances to the next block; then skips blocks already claimed
// by group peers, wrapping around. When peers hold every block the lowest
// index is reused and *exhausted is set.
int select_roster(const RosterPlan& plan, std::optional<int> prev_roster,
                  double least_popular_request_interval, double tad_of_roster,
                  double ferry_revisit_interval,
                  std::span<const int> group_peers,
                  bool* exhausted = nullptr);

struct FerryState {
  int ferry_id = 0;
  int group_id = 0;
  std::vector<ContentId> cache;  // sorted
  int roster_index = -1;
  int position = 0;  // trajectory slot (anchor the ferry is at or heading to)
};

// Loads the selected roster, replacing members already cached at the next
// anchor by the best-scored replacements that are in neither the ferry
// cache nor the avoid set. Exhausted replacements leave the cache short.
// `avoid` is the next anchor's cache, optionally extended with group
// peers' freshly loaded caches so a co-departing group stays disjoint.
void refresh_ferry_cache(FerryState& state, const RosterPlan& plan,
                         std::span<const ContentId> avoid,
                         std::span<const ScoredContent> replacement_pool);

} // namespace uavsim
