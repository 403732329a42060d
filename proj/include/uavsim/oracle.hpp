#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uavsim/content_demand.hpp"

namespace uavsim {

// Per-community inputs to the benchmark preloading: popularity and
// deadline (seconds) for every content under that community's demand.
struct CommunityDemand {
  std::vector<double> popularity;  // indexed by content id, sums to 1
  std::vector<double> tad;         // seconds, strictly positive
};

// Benchmark cache layout. Segment-1 splits into contents cached at every
// anchor (non-exclusive) and contents cached only where they rank high
// enough (exclusive, charged to that anchor's own budget). Segment-2
// contents never repeat across anchors.
struct SegmentedCachePlan {
  double lambda = 0.0;
  int anchor_capacity = 0;
  std::vector<ContentId> segment1_nonexclusive;            // sorted
  std::vector<std::vector<ContentId>> segment1_exclusive;  // per anchor, sorted
  std::vector<std::vector<ContentId>> segment2;            // per anchor, sorted
  std::vector<std::vector<double>> community_value;        // per community
  std::vector<double> global_value;                        // mean across communities

  int n_anchor() const { return static_cast<int>(segment2.size()); }
  // Full cache of one anchor (Segment-1 union Segment-2), sorted.
  std::vector<ContentId> anchor_cache(AnchorId a) const;
  // All ferried-eligible contents: every exclusive plus every Segment-2
  // entry, sorted.
  std::vector<ContentId> ferried_eligible() const;
};

// Segment-1/Segment-2 sizes for a segmentation factor; s1 rounds half up.
std::pair<int, int> segment_sizes(double lambda, int anchor_capacity);

// Distinct contents the benchmark layout stores system-wide under
// homogeneous demand.
long long system_content_count(double lambda, int anchor_capacity,
                               int n_anchor);

// Value of a content: popularity scaled by urgency, normalized so the
// most popular / most urgent content scores kappa.
double content_value(double popularity, double tad, double tad_min,
                     double p_max, double kappa);

// Builds the segmented plan from a-priori demand knowledge. Segment-1
// holds each community's top-s1 contents by value; Segment-2 deals the
// next-best contents by global value round-robin across anchors (or
// shuffled when a seed is supplied).
SegmentedCachePlan preload_anchor_caches(
    const std::vector<CommunityDemand>& profiles, double lambda,
    int anchor_capacity, double kappa = 1.0,
    std::optional<std::uint64_t> shuffle_seed = std::nullopt);

// Contents a ferry should carry toward next_anchor: the highest-valued
// ferried-eligible contents absent from that anchor's cache, at most
// ferry_capacity of them (all of them when fewer exist). Values are taken
// from the destination community's perspective.
std::vector<ContentId> benchmark_ferry_load(
    const SegmentedCachePlan& plan, int ferry_capacity, AnchorId next_anchor,
    AnchorId current_anchor, std::span<const ContentId> current_ferry_cache);

struct UpperBoundParams {
  int n_anchor = 0;
  int n_ferry = 0;
  int ferry_group_size = 1;
  double hover_ratio = 0.0;
  double transit_ratio = 0.0;
  double cycle_time = 0.0;  // seconds
  double mean_tad = 0.0;    // seconds
};

// Time for a ferry to revisit a location; negative means some ferry is
// always in range.
double t_cond(const UpperBoundParams& p);

// Probability that a ferry is accessible before a request expires;
// 1 whenever mean_tad >= t_cond, clamped to [0, 1].
double p_access(const UpperBoundParams& p);

// Value mass of the anchor's Segment-1 contents relative to all
// ferried-eligible contents, clamped to [0, 1]. No eligible contents
// yields 0; eligible contents with zero total value is a degenerate plan.
double p_mf(const SegmentedCachePlan& plan, std::span<const double> values,
            AnchorId anchor);

// Value mass of the anchor's full cache relative to the whole catalog.
double p_a(const SegmentedCachePlan& plan, std::span<const double> values,
           AnchorId anchor);

// P_A + P_access * P_MF, clamped to [0, 1].
double availability_upper_bound(const SegmentedCachePlan& plan,
                                std::span<const double> values,
                                const UpperBoundParams& p, AnchorId anchor);

} // namespace uavsim
