#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "uavsim/ferry.hpp"
#include "uavsim/rng.hpp"

using namespace uavsim;

namespace {

std::vector<ScoredContent> scored(std::initializer_list<ScoredContent> items) {
  return {items};
}

} // namespace

TEST_CASE("roster partitioning") {
  SUBCASE("six contents into three blocks of two") {
    const auto plan = partition_rosters(
        scored({{0, 0.9}, {1, 0.8}, {2, 0.7}, {3, 0.6}, {4, 0.5}, {5, 0.4}}),
        2);
    REQUIRE(plan.size() == 3);
    CHECK(plan.rosters[0] == std::vector<ContentId>{0, 1});
    CHECK(plan.rosters[1] == std::vector<ContentId>{2, 3});
    CHECK(plan.rosters[2] == std::vector<ContentId>{4, 5});
  }

  SUBCASE("short final block") {
    const auto plan = partition_rosters(
        scored({{0, 0.5}, {1, 0.4}, {2, 0.3}, {3, 0.2}, {4, 0.1}}), 2);
    REQUIRE(plan.size() == 3);
    CHECK(plan.rosters[2] == std::vector<ContentId>{4});
  }

  SUBCASE("empty eligible set") {
    CHECK(partition_rosters({}, 3).empty());
  }

  SUBCASE("ties resolve by content id, matching a stable sort") {
    RandomStream rng(23);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<ScoredContent> eligible;
      const int n = 1 + static_cast<int>(rng.uniform_int(12));
      for (int i = 0; i < n; ++i) {
        eligible.push_back(
            {i, rng.u01() < 0.4 ? 0.5 : rng.u01()});  // frequent ties
      }
      const int roster_size = 1 + static_cast<int>(rng.uniform_int(4));
      const auto plan = partition_rosters(eligible, roster_size);

      // Oracle: stable sort by descending score over id-ascending input.
      auto expected = eligible;
      std::stable_sort(expected.begin(), expected.end(),
                       [](const ScoredContent& a, const ScoredContent& b) {
                         return a.score > b.score;
                       });
      std::size_t pos = 0;
      for (const auto& roster : plan.rosters) {
        for (ContentId id : roster) {
          CHECK(id == expected[pos].id);
          ++pos;
        }
      }
      CHECK(pos == expected.size());
    }
  }

  SUBCASE("descending blocks: roster boundaries never invert") {
    RandomStream rng(29);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<ScoredContent> eligible;
      const int n = 2 + static_cast<int>(rng.uniform_int(20));
      for (int i = 0; i < n; ++i) eligible.push_back({i, rng.u01()});
      const auto plan = partition_rosters(eligible, 3);
      std::vector<double> score(n);
      for (const auto& e : eligible) score[e.id] = e.score;
      for (int r = 0; r + 1 < plan.size(); ++r) {
        double lo = 1e9;
        for (ContentId id : plan.rosters[r]) lo = std::min(lo, score[id]);
        double hi = -1e9;
        for (ContentId id : plan.rosters[r + 1]) hi = std::max(hi, score[id]);
        CHECK(lo >= hi);
      }
    }
  }
}

TEST_CASE("roster selection") {
  const auto plan = partition_rosters(
      scored({{0, 0.9}, {1, 0.8}, {2, 0.7}, {3, 0.6}, {4, 0.5}, {5, 0.4},
              {6, 0.3}, {7, 0.2}}),
      2);  // four rosters

  SUBCASE("no previous ferry and no peers takes the top block") {
    CHECK(select_roster(plan, std::nullopt, 1.0, 10.0, 100.0, {}) == 0);
  }

  SUBCASE("hot roster is kept") {
    // Least popular content still requested within its deadline and the
    // revisit interval.
    CHECK(select_roster(plan, 0, 5.0, 10.0, 100.0, {}) == 0);
  }

  SUBCASE("cold roster advances") {
    CHECK(select_roster(plan, 0, 50.0, 10.0, 100.0, {}) == 1);
    // The revisit interval binds too.
    CHECK(select_roster(plan, 1, 5.0, 10.0, 3.0, {}) == 2);
  }

  SUBCASE("wraps modulo the roster count") {
    CHECK(select_roster(plan, 3, 50.0, 10.0, 100.0, {}) == 0);
  }

  SUBCASE("peers holding 0 and 1 push this ferry to 2") {
    const std::vector<int> peers = {0, 1};
    CHECK(select_roster(plan, std::nullopt, 1.0, 10.0, 100.0, peers) == 2);
  }

  SUBCASE("fully claimed plan falls back with a warning") {
    const std::vector<int> peers = {0, 1, 2, 3};
    bool exhausted = false;
    CHECK(select_roster(plan, std::nullopt, 1.0, 10.0, 100.0, peers,
                        &exhausted) == 0);
    CHECK(exhausted);
  }
}

TEST_CASE("ferry cache refresh") {
  const auto plan = partition_rosters(
      scored({{0, 0.9}, {1, 0.8}, {2, 0.7}, {3, 0.6}, {4, 0.5}, {5, 0.4}}),
      3);

  FerryState ferry;
  ferry.ferry_id = 0;
  ferry.group_id = 0;

  SUBCASE("roster disjoint from the next anchor loads unchanged") {
    ferry.roster_index = 0;
    const std::vector<ContentId> avoid = {10, 11};
    refresh_ferry_cache(ferry, plan, avoid, {});
    CHECK(ferry.cache == std::vector<ContentId>{0, 1, 2});
  }

  SUBCASE("members present at the next anchor are replaced by score") {
    ferry.roster_index = 0;
    const std::vector<ContentId> avoid = {0, 1, 2};  // whole roster blocked
    const auto pool =
        scored({{3, 0.6}, {4, 0.5}, {5, 0.4}, {0, 0.9}, {10, 0.95}});
    refresh_ferry_cache(ferry, plan, avoid, pool);
    // Highest-scored pool entries that are neither blocked nor aboard.
    CHECK(ferry.cache == std::vector<ContentId>{3, 4, 10});
  }

  SUBCASE("exhausted replacements leave the cache short") {
    ferry.roster_index = 0;
    const std::vector<ContentId> avoid = {0, 1, 2, 3};
    const auto pool = scored({{3, 0.6}, {1, 0.8}});
    refresh_ferry_cache(ferry, plan, avoid, pool);
    CHECK(ferry.cache.empty());
  }

  SUBCASE("no roster selected is an error") {
    ferry.roster_index = -1;
    CHECK_THROWS_AS(refresh_ferry_cache(ferry, plan, {}, {}),
                    std::logic_error);
  }
}

TEST_CASE("coordinated group refresh fills min(g*cap, eligible) slots") {
  RandomStream rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const int eligible_count = 1 + static_cast<int>(rng.uniform_int(30));
    const int capacity = 1 + static_cast<int>(rng.uniform_int(6));
    const int group = 1 + static_cast<int>(rng.uniform_int(4));
    std::vector<ScoredContent> eligible;
    for (int i = 0; i < eligible_count; ++i) {
      eligible.push_back({i, rng.u01()});
    }
    const auto plan = partition_rosters(eligible, capacity);

    std::set<ContentId> loaded;
    std::vector<int> claimed;
    for (int member = 0; member < group; ++member) {
      FerryState ferry;
      ferry.ferry_id = member;
      ferry.group_id = 0;
      ferry.roster_index =
          select_roster(plan, std::nullopt, 1.0, 10.0, 100.0, claimed);
      claimed.push_back(ferry.roster_index);
      refresh_ferry_cache(ferry, plan, {}, {});
      for (ContentId id : ferry.cache) loaded.insert(id);
      CHECK(static_cast<int>(ferry.cache.size()) <= capacity);
    }
    const int expected = std::min<int>(group * capacity, eligible_count);
    CHECK(static_cast<int>(loaded.size()) == expected);
  }
}

TEST_CASE("refresh never intersects the avoid set") {
  RandomStream rng(43);
  for (int trial = 0; trial < 40; ++trial) {
    const int c = 20;
    std::vector<ScoredContent> eligible;
    for (int i = 0; i < c; ++i) eligible.push_back({i, rng.u01()});
    const auto plan = partition_rosters(eligible, 5);

    std::vector<ContentId> avoid;
    for (int i = 0; i < c; ++i) {
      if (rng.u01() < 0.3) avoid.push_back(i);
    }
    std::vector<ScoredContent> pool;
    for (int i = 0; i < c; ++i) pool.push_back({i, rng.u01()});

    FerryState ferry;
    ferry.roster_index = static_cast<int>(rng.uniform_int(plan.size()));
    refresh_ferry_cache(ferry, plan, avoid, pool);
    for (ContentId id : ferry.cache) {
      CHECK(std::find(avoid.begin(), avoid.end(), id) == avoid.end());
    }
    std::set<ContentId> unique(ferry.cache.begin(), ferry.cache.end());
    CHECK(unique.size() == ferry.cache.size());
  }
}
