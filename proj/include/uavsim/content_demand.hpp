#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uavsim/rng.hpp"

namespace uavsim {

using ContentId = std::int32_t;
using AnchorId = std::int32_t;

// Global content pool with rank-ordered Zipf popularity. Content id c
// holds global rank c+1, so base_popularity[c] is the popularity of c.
struct Catalog {
  int catalog_size = 0;
  double zipf_alpha = 0.0;
  std::vector<double> base_popularity;
};

// Popularity of the content at `rank` (1-based) under a Zipf law with
// skew `alpha` over `catalog_size` contents.
double zipf_popularity(int rank, double alpha, int catalog_size);

Catalog make_catalog(int catalog_size, double zipf_alpha);

// Deadline rule: ratio of the trajectory period granted to a request,
// piecewise-constant over content-id ranges.
struct TadRule {
  struct Range {
    ContentId lo = 0;
    ContentId hi = 0;  // inclusive
    double ratio = 0.0;
  };
  std::vector<Range> overrides;
  double default_ratio = 0.125;

  double ratio_for(ContentId c) const {
    for (const auto& r : overrides) {
      if (c >= r.lo && c <= r.hi) return r.ratio;
    }
    return default_ratio;
  }
};

// One community's demand model. rank_permutation[r] is the content id
// holding local rank r+1; the identity permutation reproduces the global
// ordering.
struct CommunityProfile {
  AnchorId community_id = 0;
  std::vector<ContentId> rank_permutation;
  TadRule tad_rule;
  double request_rate = 1.0;
};

struct Request {
  AnchorId community_id = 0;
  ContentId content_id = 0;
  double issue_time = 0.0;
  double tad = 0.0;
};

// Smith-Waterman local alignment score with match=+2, mismatch=-1,
// gap=-1. Symmetric; 0 for an empty input.
long long smith_waterman(std::span<const ContentId> a,
                         std::span<const ContentId> b);

// Permutes the global ranking by neighborhood swaps (window +-10, each
// position swapped with probability swap_probability) and resamples until
// the Smith-Waterman similarity to the identity sequence drops to at most
// 2*C - min_distance. Deterministic for a fixed seed. The caller fills in
// community_id, tad_rule and request_rate.
CommunityProfile derive_heterogeneous_profile(const Catalog& base,
                                              double swap_probability,
                                              double min_distance,
                                              std::uint64_t seed);

// Draws requests for one community: exponential inter-arrival times and
// contents from the community's permuted Zipf distribution. Holds the
// popularity CDF so sampling is O(log C).
class RequestSampler {
 public:
  RequestSampler(const CommunityProfile& profile, const Catalog& catalog,
                 double trajectory_period);

  // Returns the request issued at `now` plus the absolute time of the
  // next arrival.
  std::pair<Request, double> sample(double now, RandomStream& rng) const;

  // Popularity of a content in this community.
  double popularity(ContentId c) const { return popularity_[c]; }
  const std::vector<double>& popularity_by_content() const {
    return popularity_;
  }
  double tad_seconds(ContentId c) const;

 private:
  const CommunityProfile* profile_;
  double trajectory_period_;
  std::vector<double> popularity_;  // indexed by content id
  std::vector<double> cdf_;         // over local ranks
};

std::pair<Request, double> sample_request(const CommunityProfile& profile,
                                          const Catalog& catalog,
                                          double trajectory_period, double now,
                                          RandomStream& rng);

} // namespace uavsim
