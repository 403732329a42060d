#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "uavsim/oracle.hpp"
#include "uavsim/rng.hpp"

using namespace uavsim;

namespace {

// Uniform-TAD demand with the given popularity vector.
CommunityDemand make_demand(std::vector<double> popularity, double tad = 10.0) {
  CommunityDemand d;
  d.tad.assign(popularity.size(), tad);
  d.popularity = std::move(popularity);
  return d;
}

std::vector<double> zipfish(int c) {
  std::vector<double> p(c);
  double total = 0.0;
  for (int i = 0; i < c; ++i) {
    p[i] = 1.0 / (1.0 + i);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

void check_plan_invariants(const SegmentedCachePlan& plan, int catalog_size) {
  const int n = plan.n_anchor();
  const auto [s1, s2] = segment_sizes(plan.lambda, plan.anchor_capacity);
  std::set<ContentId> seg2_all;
  for (int a = 0; a < n; ++a) {
    // Disjoint segments of exactly the right sizes per anchor.
    std::set<ContentId> seen(plan.segment1_nonexclusive.begin(),
                             plan.segment1_nonexclusive.end());
    CHECK(static_cast<int>(seen.size() + plan.segment1_exclusive[a].size()) ==
          s1);
    for (ContentId cc : plan.segment1_exclusive[a]) {
      CHECK(seen.insert(cc).second);
    }
    for (ContentId cc : plan.segment2[a]) {
      CHECK(seen.insert(cc).second);
      CHECK(seg2_all.insert(cc).second);  // never repeats across anchors
    }
    CHECK(static_cast<int>(seen.size()) == plan.anchor_capacity);
    CHECK(static_cast<int>(plan.segment2[a].size()) == s2);
    CHECK(static_cast<int>(plan.anchor_cache(a).size()) ==
          plan.anchor_capacity);
    for (ContentId cc : seen) {
      CHECK(cc >= 0);
      CHECK(cc < catalog_size);
    }
  }
}

} // namespace

TEST_CASE("segment sizes") {
  CHECK(segment_sizes(0.5, 200) == std::pair{100, 100});
  CHECK(segment_sizes(1.0, 200) == std::pair{200, 0});
  CHECK(segment_sizes(0.25, 200) == std::pair{50, 150});
  CHECK(segment_sizes(0.5, 5) == std::pair{3, 2});  // half rounds up
}

TEST_CASE("system content count") {
  CHECK(system_content_count(0.5, 200, 4) == 500);
  CHECK(system_content_count(1.0, 200, 4) == 200);
  CHECK(system_content_count(0.0, 200, 4) == 800);
}

TEST_CASE("content value") {
  const double p_max = 0.2;
  const double tad_min = 2.0;
  CHECK(content_value(p_max, tad_min, tad_min, p_max, 1.0) ==
        doctest::Approx(1.0));
  CHECK(content_value(p_max, 2.0 * tad_min, tad_min, p_max, 1.0) ==
        doctest::Approx(0.5));
  CHECK(content_value(0.1, 4.0, tad_min, p_max, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(content_value(0.1, 1.0, tad_min, p_max, 1.0),
                  std::domain_error);
}

TEST_CASE("preload with homogeneous demand and lambda 1") {
  const auto pop = zipfish(10);
  const std::vector<CommunityDemand> profiles(3, make_demand(pop));
  const auto plan = preload_anchor_caches(profiles, 1.0, 4);
  check_plan_invariants(plan, 10);
  // Identical top-value sets everywhere: everything is non-exclusive.
  CHECK(plan.segment1_nonexclusive == std::vector<ContentId>{0, 1, 2, 3});
  for (int a = 0; a < 3; ++a) {
    CHECK(plan.segment1_exclusive[a].empty());
    CHECK(plan.segment2[a].empty());
    CHECK(plan.anchor_cache(a) == std::vector<ContentId>{0, 1, 2, 3});
  }
  CHECK(plan.ferried_eligible().empty());
}

TEST_CASE("preload splits segment-2 by value round-robin") {
  // Homogeneous, lambda=0.5, N_A=2, capacity 4, C=10: Segment-2 holds the
  // value ranks 3..6 split across the anchors with no repeats.
  const auto pop = zipfish(10);
  const std::vector<CommunityDemand> profiles(2, make_demand(pop));
  const auto plan = preload_anchor_caches(profiles, 0.5, 4);
  check_plan_invariants(plan, 10);
  CHECK(plan.segment1_nonexclusive == std::vector<ContentId>{0, 1});
  std::set<ContentId> seg2;
  for (int a = 0; a < 2; ++a) {
    for (ContentId c : plan.segment2[a]) seg2.insert(c);
  }
  CHECK(seg2 == std::set<ContentId>{2, 3, 4, 5});
}

TEST_CASE("differing top content becomes exclusive at its own anchor") {
  // Community 0 favors content 0, community 1 favors content 5.
  std::vector<double> pop_a = {0.5, 0.2, 0.1, 0.1, 0.05, 0.05};
  std::vector<double> pop_b = {0.05, 0.2, 0.1, 0.1, 0.05, 0.5};
  const std::vector<CommunityDemand> profiles = {make_demand(pop_a),
                                                 make_demand(pop_b)};
  const auto plan = preload_anchor_caches(profiles, 1.0, 2);
  check_plan_invariants(plan, 6);
  // Top-2 of community 0 is {0, 1}; of community 1 is {5, 1}.
  CHECK(plan.segment1_nonexclusive == std::vector<ContentId>{1});
  CHECK(plan.segment1_exclusive[0] == std::vector<ContentId>{0});
  CHECK(plan.segment1_exclusive[1] == std::vector<ContentId>{5});
}

TEST_CASE("preload rejects infeasible capacity") {
  const auto pop = zipfish(6);
  const std::vector<CommunityDemand> profiles(4, make_demand(pop));
  CHECK_THROWS_WITH_AS(preload_anchor_caches(profiles, 0.0, 2),
                       doctest::Contains("infeasible"), std::runtime_error);
}

TEST_CASE("plan invariants hold over randomized heterogeneous profiles") {
  RandomStream rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int c = 12 + static_cast<int>(rng.uniform_int(20));
    const int n_anchor = 2 + static_cast<int>(rng.uniform_int(3));
    const int capacity = 2 + static_cast<int>(rng.uniform_int(3));
    const double lambda = rng.u01();
    // The storage constraint guarantees feasibility even when exclusive
    // contents widen Segment-1 beyond the homogeneous count.
    if (n_anchor * capacity >= c) continue;
    std::vector<CommunityDemand> profiles;
    for (int a = 0; a < n_anchor; ++a) {
      std::vector<double> pop(c);
      double total = 0.0;
      for (double& p : pop) {
        p = 0.05 + rng.u01();
        total += p;
      }
      for (double& p : pop) p /= total;
      CommunityDemand d = make_demand(std::move(pop));
      for (double& t : d.tad) t = 5.0 + 10.0 * rng.u01();
      profiles.push_back(std::move(d));
    }
    const auto plan =
        preload_anchor_caches(profiles, lambda, capacity);
    check_plan_invariants(plan, c);
  }
}

TEST_CASE("benchmark ferry load") {
  SUBCASE("empty eligible set") {
    const auto pop = zipfish(10);
    const std::vector<CommunityDemand> profiles(2, make_demand(pop));
    const auto plan = preload_anchor_caches(profiles, 1.0, 3);
    CHECK(benchmark_ferry_load(plan, 5, 0, 1, {}).empty());
  }

  SUBCASE("partial cache when eligible runs short") {
    const auto pop = zipfish(12);
    const std::vector<CommunityDemand> profiles(2, make_demand(pop));
    // lambda=0.5, capacity 3 -> s1=2, s2=1: one Segment-2 content per
    // anchor, so the pool toward either anchor has one entry.
    const auto plan = preload_anchor_caches(profiles, 0.5, 3);
    const auto load = benchmark_ferry_load(plan, 5, 0, 1, {});
    CHECK(load.size() == 1);
  }

  SUBCASE("two anchors, lambda 0: the other anchor's best segment-2") {
    const auto pop = zipfish(10);
    const std::vector<CommunityDemand> profiles(2, make_demand(pop));
    const auto plan = preload_anchor_caches(profiles, 0.0, 3);
    // Candidates 0..5 by value, dealt round-robin: anchor 0 gets {0,2,4},
    // anchor 1 gets {1,3,5}. Toward anchor 0 the pool is {1,3,5}.
    const auto load = benchmark_ferry_load(plan, 2, 0, 1, {});
    CHECK(load == std::vector<ContentId>{1, 3});
  }

  SUBCASE("matches exhaustive search on small instances") {
    RandomStream rng(77);
    for (int trial = 0; trial < 25; ++trial) {
      const int c = 8 + static_cast<int>(rng.uniform_int(5));  // <= 12
      const int n_anchor = 2 + static_cast<int>(rng.uniform_int(2));
      const int capacity = 2;
      const double lambda = rng.u01() < 0.5 ? 0.0 : 0.5;
      if (system_content_count(lambda, capacity, n_anchor) > c) continue;
      std::vector<CommunityDemand> profiles;
      for (int a = 0; a < n_anchor; ++a) {
        std::vector<double> pop(c);
        double total = 0.0;
        for (double& p : pop) {
          p = 0.05 + rng.u01();
          total += p;
        }
        for (double& p : pop) p /= total;
        profiles.push_back(make_demand(std::move(pop)));
      }
      const auto plan = preload_anchor_caches(profiles, lambda, capacity);
      const int ferry_capacity = 1 + static_cast<int>(rng.uniform_int(4));
      const auto got = benchmark_ferry_load(plan, ferry_capacity, 0, 1, {});

      // Exhaustive oracle: best value subset of the eligible pool.
      const auto cache = plan.anchor_cache(0);
      std::vector<ContentId> pool;
      for (ContentId id : plan.ferried_eligible()) {
        if (std::find(cache.begin(), cache.end(), id) == cache.end()) {
          pool.push_back(id);
        }
      }
      const int take = std::min<int>(ferry_capacity, pool.size());
      double best_mass = -1.0;
      std::vector<ContentId> best;
      std::vector<int> pick(pool.size(), 0);
      std::fill(pick.end() - take, pick.end(), 1);
      do {
        double mass = 0.0;
        std::vector<ContentId> subset;
        for (std::size_t i = 0; i < pool.size(); ++i) {
          if (pick[i]) {
            mass += plan.community_value[0][pool[i]];
            subset.push_back(pool[i]);
          }
        }
        if (mass > best_mass + 1e-15) {
          best_mass = mass;
          best = subset;
        }
      } while (std::next_permutation(pick.begin(), pick.end()));

      double got_mass = 0.0;
      for (ContentId id : got) got_mass += plan.community_value[0][id];
      CHECK(got.size() == best.size());
      CHECK(got_mass == doctest::Approx(best_mass));
      // No overlap with the destination cache.
      for (ContentId id : got) {
        CHECK(std::find(cache.begin(), cache.end(), id) == cache.end());
      }
    }
  }
}

TEST_CASE("t_cond") {
  UpperBoundParams p;
  p.n_anchor = 4;
  p.n_ferry = 1;
  p.ferry_group_size = 1;
  p.hover_ratio = 1.0 / 6.0;
  p.transit_ratio = 1.0 / 12.0;
  p.cycle_time = 1.0;
  CHECK(t_cond(p) == doctest::Approx(5.0 / 6.0));
  p.n_ferry = 8;
  CHECK(t_cond(p) == doctest::Approx(-1.0 / 24.0));
  // One ferry group per anchor and no transit: revisit is instantaneous.
  p.n_ferry = 4;
  p.transit_ratio = 1e-12;
  CHECK(t_cond(p) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("p_access") {
  UpperBoundParams p;
  p.n_anchor = 4;
  p.n_ferry = 1;
  p.ferry_group_size = 1;
  p.hover_ratio = 1.0 / 6.0;
  p.transit_ratio = 1.0 / 12.0;
  p.cycle_time = 1.0;

  SUBCASE("saturates at the revisit time") {
    p.mean_tad = t_cond(p);
    CHECK(p_access(p) == doctest::Approx(1.0));
    p.mean_tad = 10.0;
    CHECK(p_access(p) == doctest::Approx(1.0));
  }

  SUBCASE("partial accessibility below it") {
    p.mean_tad = 0.0;
    CHECK(p_access(p) == doctest::Approx(1.0 / 6.0));
  }

  SUBCASE("default fleet keeps a ferry always in range") {
    p.n_ferry = 8;
    CHECK(t_cond(p) < 0.0);
    for (double tad : {0.0, 0.01, 5.0}) {
      p.mean_tad = tad;
      CHECK(p_access(p) == doctest::Approx(1.0));
    }
  }

  SUBCASE("continuous at the boundary") {
    p.mean_tad = t_cond(p) - 1e-9;
    CHECK(p_access(p) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("p_mf and p_a value-mass ratios") {
  // Two communities over 8 contents, uniform values for hand arithmetic.
  std::vector<double> pop(8, 0.125);
  const std::vector<CommunityDemand> profiles(2, make_demand(pop));
  // capacity 4, lambda 0.5: s1=2 (ids 0,1 non-exclusive under the id
  // tie-break), s2=2 each from candidates {2..7}.
  const auto plan = preload_anchor_caches(profiles, 0.5, 4);
  const std::vector<double> uniform(8, 0.25);

  // Numerator: anchor 0's Segment-1 (2 contents); denominator: the 4
  // Segment-2 contents system-wide.
  CHECK(p_mf(plan, uniform, 0) == doctest::Approx(0.5));
  // Full cache of 4 contents out of 8.
  CHECK(p_a(plan, uniform, 0) == doctest::Approx(0.5));

  SUBCASE("equal numerator and denominator mass gives exactly 1") {
    // Heterogeneous plan with exclusives: all value sits on anchor 0's
    // exclusive content, which appears in both the segment-1 numerator
    // and the ferried-eligible denominator.
    std::vector<double> pop_a = {0.5, 0.2, 0.1, 0.1, 0.05, 0.05};
    std::vector<double> pop_b = {0.05, 0.2, 0.1, 0.1, 0.05, 0.5};
    const std::vector<CommunityDemand> two = {make_demand(pop_a),
                                              make_demand(pop_b)};
    const auto hetero = preload_anchor_caches(two, 1.0, 2);
    REQUIRE(hetero.segment1_exclusive[0] == std::vector<ContentId>{0});
    std::vector<double> concentrated(6, 0.0);
    concentrated[0] = 1.0;
    CHECK(p_mf(hetero, concentrated, 0) == doctest::Approx(1.0));
  }

  SUBCASE("empty eligible set yields zero") {
    const auto full = preload_anchor_caches(profiles, 1.0, 4);
    CHECK(p_mf(full, uniform, 0) == doctest::Approx(0.0));
  }

  SUBCASE("degenerate nonempty eligible set with zero mass") {
    std::vector<double> zero_on_eligible(8, 0.0);
    for (ContentId c : plan.segment1_nonexclusive) zero_on_eligible[c] = 0.5;
    CHECK_THROWS_WITH_AS(p_mf(plan, zero_on_eligible, 0),
                         doctest::Contains("degenerate"), std::runtime_error);
  }

  SUBCASE("hand-summed four-content instance") {
    std::vector<double> pop4 = {0.4, 0.3, 0.2, 0.1};
    const std::vector<CommunityDemand> two(2, make_demand(pop4));
    const auto plan4 = preload_anchor_caches(two, 0.5, 2);
    // s1=1: non-exclusive {0}; s2=1 each: anchor0 {1}, anchor1 {2}.
    const auto& v = plan4.community_value[0];
    const double expected_mf = v[0] / (v[1] + v[2]);
    CHECK(p_mf(plan4, v, 0) ==
          doctest::Approx(std::clamp(expected_mf, 0.0, 1.0)));
    const double expected_a = (v[0] + v[1]) / (v[0] + v[1] + v[2] + v[3]);
    CHECK(p_a(plan4, v, 0) == doctest::Approx(expected_a));
  }
}

TEST_CASE("availability upper bound") {
  std::vector<double> pop(8, 0.125);
  const std::vector<CommunityDemand> profiles(2, make_demand(pop));
  const auto plan = preload_anchor_caches(profiles, 0.5, 4);
  const std::vector<double> uniform(8, 0.25);

  UpperBoundParams p;
  p.n_anchor = 2;
  p.n_ferry = 8;
  p.ferry_group_size = 1;
  p.hover_ratio = 1.0 / 6.0;
  p.transit_ratio = 1.0 / 12.0;
  p.cycle_time = 1.0;
  p.mean_tad = 0.5;

  SUBCASE("p_access of zero degenerates to p_a") {
    UpperBoundParams zero = p;
    zero.n_ferry = 1;
    zero.hover_ratio = 1e-12;
    zero.mean_tad = 0.0;
    // Hover ratio ~0 with one ferry: access probability ~0.
    CHECK(p_access(zero) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(availability_upper_bound(plan, uniform, zero, 0) ==
          doctest::Approx(p_a(plan, uniform, 0)).epsilon(1e-6));
  }

  SUBCASE("clamped to 1") {
    // p_a = 0.5, p_mf = 0.5, p_access = 1 -> exactly 1 pre-clamp; scale
    // the values on the cache upward to force the clamp.
    std::vector<double> heavy(8, 0.05);
    for (ContentId c : plan.anchor_cache(0)) heavy[c] = 1.0;
    CHECK(availability_upper_bound(plan, heavy, p, 0) == doctest::Approx(1.0));
  }

  SUBCASE("lambda 1 homogeneous reduces to p_a") {
    const auto full = preload_anchor_caches(profiles, 1.0, 4);
    CHECK(availability_upper_bound(full, uniform, p, 0) ==
          doctest::Approx(p_a(full, uniform, 0)));
  }

  SUBCASE("nondecreasing in mean_tad and n_ferry") {
    for (int n_ferry = 1; n_ferry <= 6; ++n_ferry) {
      double prev = -1.0;
      for (double tad = 0.0; tad <= 1.2; tad += 0.05) {
        UpperBoundParams q = p;
        q.n_ferry = n_ferry;
        q.mean_tad = tad;
        const double b = availability_upper_bound(plan, uniform, q, 0);
        CHECK(b >= prev - 1e-12);
        prev = b;
      }
    }
    for (double tad : {0.0, 0.2, 0.6}) {
      double prev = -1.0;
      for (int n_ferry = 1; n_ferry <= 8; ++n_ferry) {
        UpperBoundParams q = p;
        q.n_ferry = n_ferry;
        q.mean_tad = tad;
        const double b = availability_upper_bound(plan, uniform, q, 0);
        CHECK(b >= prev - 1e-12);
        prev = b;
      }
    }
  }
}
