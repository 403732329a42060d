#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uavsim/content_demand.hpp"

namespace uavsim {

// One learning epoch at one community, as emitted to CSV. Counts cover
// the window since that community's previous epoch.
struct EpochRecord {
  std::int64_t epoch = 0;
  double time = 0.0;
  AnchorId community = 0;
  std::int64_t hits = 0;
  std::int64_t requests = 0;
  double availability = 0.0;           // hits / requests, 0 on an empty window
  double relative_availability = 0.0;  // availability / analytical bound
  double mean_access_delay = 0.0;      // seconds, over this window's hits
  std::int64_t downloads = 0;          // deadline expiries (vertical link)
  double cdo = 0.0;                    // Jaro-Winkler vs benchmark ranking
};

struct ReactivityReport {
  double psi = 0.0;        // time until availability starts recovering
  double chi = 0.0;        // trough availability after the shift
  double zeta_cross = 0.0; // (tau - tau_c) / tau
  double tau = 0.0;
  double tau_c = 0.0;
};

// hits / requests with the empty-window convention of 0.
double availability(std::int64_t hits, std::int64_t requests);

// Jaro-Winkler similarity over token sequences (prefix scale 0.1, prefix
// cap 4). 1 for identical sequences, 0 when nothing matches.
double jaro_winkler(std::span<const ContentId> a, std::span<const ContentId> b);

// Cache distribution optimality: Jaro-Winkler similarity between the
// learned ranking and the benchmark ranking, both at cache length.
double cdo(std::span<const ContentId> learned_ranked,
           std::span<const ContentId> benchmark_ranked);

struct SeriesPoint {
  double time = 0.0;
  double value = 0.0;
};

// Post-shift recovery measures over [shift_time, shift_time + tau]:
// psi is the onset of a sustained increase (three consecutive improving
// epochs), chi the minimum before that onset, and zeta_cross the portion
// of tau remaining after this series first exceeds the baseline (0 when
// it never does).
ReactivityReport reactivity(std::span<const SeriesPoint> series,
                            double shift_time,
                            std::span<const SeriesPoint> baseline_series,
                            double tau);

} // namespace uavsim
