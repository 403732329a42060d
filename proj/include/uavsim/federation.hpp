#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace uavsim {

// Request tallies observed at one anchor. distribution() applies additive
// smoothing of 1/(10*C) so every entry stays positive and KL terms stay
// finite.
struct PopularityEstimate {
  std::vector<std::uint64_t> counts;

  explicit PopularityEstimate(int catalog_size = 0) : counts(catalog_size, 0) {}

  void observe(int content) { ++counts[content]; }
  std::vector<double> distribution() const;
};

enum class Omega1Mode { fixed, adaptive };

struct FederationConfig {
  double beta_decay = 0.01;    // exponential decay of the aggregated weight
  double beta_scale = 2.0;     // scaling of the aggregated weight, > 0
  int latency_threshold = 10;  // epochs between federated updates
  Omega1Mode omega1_mode = Omega1Mode::fixed;
  double omega1_fixed = 0.99;
};

struct LatencyCounter {
  int value = 0;
};

enum class GateDecision { federate_and_reset, defer_and_increment };

// KL divergence sum p_i ln(p_i / q_i); q must be strictly positive
// wherever p is (guaranteed for smoothed estimates).
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Jensen-Shannon divergence against the pointwise mean; symmetric and
// bounded by ln 2.
double js_divergence(std::span<const double> p, std::span<const double> q);

// Aggregation weight each peer's model gets at anchor `self`, from the
// similarity of popularity estimates: (rho - KL(self || peer)) normalized
// over peers, with rho = max pairwise KL plus a small margin so every
// weight stays positive. Identical estimates give uniform weights.
std::vector<double> contribution_factors(
    int self, const std::vector<std::vector<double>>& estimates);

// Convex combination of peer Q-tables under the contribution factors.
std::vector<double> aggregate_q(
    std::span<const double> factors,
    const std::vector<std::vector<double>>& q_tables);

// Weight of the local model: fixed 0.99, or 1 - JS/ln2 between the
// current and previous popularity estimates in adaptive mode.
double omega1(std::span<const double> p_now, std::span<const double> p_prev,
              const FederationConfig& cfg);

// Weight of the aggregated model for one content: exponential decay in
// the epoch count times the remaining regret 1 - q/R_max (q normalized
// into [0, 1] first), scaled by 1/beta_scale.
double omega2(std::int64_t epoch, double q_value, const FederationConfig& cfg);

// q_local[i] <- w1 * q_local[i] + w2[i] * q_agg[i]
void federated_update(std::span<double> q_local, std::span<const double> q_agg,
                      double w1, std::span<const double> w2);

// Counter at or past the threshold federates and resets; otherwise the
// counter advances. A zero threshold federates every epoch.
GateDecision latency_gate(LatencyCounter& counter, int threshold);

} // namespace uavsim
