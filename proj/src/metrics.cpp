#include "uavsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsim {

double availability(std::int64_t hits, std::int64_t requests) {
  if (hits < 0 || hits > requests) {
    throw std::domain_error("availability: hits outside [0, requests]");
  }
  if (requests == 0) return 0.0;
  return static_cast<double>(hits) / static_cast<double>(requests);
}

double jaro_winkler(std::span<const ContentId> a,
                    std::span<const ContentId> b) {
  const std::size_t la = a.size();
  const std::size_t lb = b.size();
  if (la == 0 && lb == 0) return 1.0;
  if (la == 0 || lb == 0) return 0.0;

  const std::size_t window =
      std::max(la, lb) / 2 > 0 ? std::max(la, lb) / 2 - 1 : 0;
  std::vector<char> matched_a(la, 0), matched_b(lb, 0);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < la; ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(lb, i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (!matched_b[j] && a[i] == b[j]) {
        matched_a[i] = 1;
        matched_b[j] = 1;
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) return 0.0;

  std::size_t transpositions = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < la; ++i) {
    if (!matched_a[i]) continue;
    while (!matched_b[j]) ++j;
    if (a[i] != b[j]) ++transpositions;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(transpositions) / 2.0;
  const double jaro = (m / la + m / lb + (m - t) / m) / 3.0;

  std::size_t prefix = 0;
  for (std::size_t i = 0; i < std::min({la, lb, std::size_t{4}}); ++i) {
    if (a[i] != b[i]) break;
    ++prefix;
  }
  return jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
}

double cdo(std::span<const ContentId> learned_ranked,
           std::span<const ContentId> benchmark_ranked) {
  if (learned_ranked.size() != benchmark_ranked.size()) {
    throw std::domain_error("cdo: ranked sequence lengths differ");
  }
  return jaro_winkler(learned_ranked, benchmark_ranked);
}

ReactivityReport reactivity(std::span<const SeriesPoint> series,
                            double shift_time,
                            std::span<const SeriesPoint> baseline_series,
                            double tau) {
  const double horizon = shift_time + tau;
  std::vector<SeriesPoint> win;
  for (const auto& p : series) {
    if (p.time > shift_time && p.time <= horizon) win.push_back(p);
  }
  if (win.size() < 4) {
    throw std::domain_error(
        "reactivity: series does not cover the post-shift window");
  }

  // Onset of sustained recovery: first point followed by three
  // consecutive improvements.
  std::size_t onset = win.size();  // none found
  for (std::size_t i = 0; i + 3 < win.size(); ++i) {
    if (win[i + 1].value > win[i].value && win[i + 2].value > win[i + 1].value &&
        win[i + 3].value > win[i + 2].value) {
      onset = i;
      break;
    }
  }

  ReactivityReport rep;
  rep.tau = tau;
  rep.psi = onset < win.size() ? win[onset].time - shift_time : tau;
  double trough = win[0].value;
  const std::size_t trough_end = onset < win.size() ? onset : win.size() - 1;
  for (std::size_t i = 0; i <= trough_end; ++i) {
    trough = std::min(trough, win[i].value);
  }
  rep.chi = trough;

  // First time this series exceeds the baseline, interpolating the
  // baseline as a step function over its own sample points.
  rep.tau_c = tau;
  for (const auto& p : win) {
    double base = 0.0;
    bool have_base = false;
    for (const auto& bq : baseline_series) {
      if (bq.time <= p.time) {
        base = bq.value;
        have_base = true;
      } else {
        break;
      }
    }
    if (have_base && p.value > base) {
      rep.tau_c = std::clamp(p.time - shift_time, 0.0, tau);
      break;
    }
  }
  rep.zeta_cross = tau > 0.0 ? (tau - rep.tau_c) / tau : 0.0;
  return rep;
}

} // namespace uavsim
