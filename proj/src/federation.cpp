#include "uavsim/federation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uavsim/bandit.hpp"
#include "uavsim/kernels.hpp"

namespace uavsim {

std::vector<double> PopularityEstimate::distribution() const {
  const std::size_t c = counts.size();
  const double smoothing = 1.0 / (10.0 * static_cast<double>(c));
  double total = 0.0;
  for (std::uint64_t n : counts) total += static_cast<double>(n);
  const double denom = total + smoothing * static_cast<double>(c);
  std::vector<double> dist(c);
  for (std::size_t i = 0; i < c; ++i) {
    dist[i] = (static_cast<double>(counts[i]) + smoothing) / denom;
  }
  return dist;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::domain_error("kl_divergence: length mismatch");
  }
  return kernels::kl_sum(p, q);
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::domain_error("js_divergence: length mismatch");
  }
  std::vector<double> mean(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mean[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * (kernels::kl_sum(p, mean) + kernels::kl_sum(q, mean));
}

std::vector<double> contribution_factors(
    int self, const std::vector<std::vector<double>>& estimates) {
  const int n = static_cast<int>(estimates.size());
  if (self < 0 || self >= n) {
    throw std::invalid_argument("contribution_factors: bad self index");
  }
  std::vector<double> kl(n);
  double rho = 0.0;
  for (int j = 0; j < n; ++j) {
    kl[j] = j == self ? 0.0 : kl_divergence(estimates[self], estimates[j]);
    rho = std::max(rho, kl[j]);
  }
  // Margin keeps the furthest peer's weight positive; with all estimates
  // equal it degenerates to uniform weights.
  constexpr double kMargin = 1e-6;
  rho += kMargin;
  std::vector<double> weights(n);
  double denom = 0.0;
  for (int j = 0; j < n; ++j) {
    weights[j] = rho - kl[j];
    denom += weights[j];
  }
  if (denom <= 0.0) {
    std::fill(weights.begin(), weights.end(), 1.0 / n);
    return weights;
  }
  for (double& w : weights) w /= denom;
  return weights;
}

std::vector<double> aggregate_q(
    std::span<const double> factors,
    const std::vector<std::vector<double>>& q_tables) {
  if (factors.size() != q_tables.size()) {
    throw std::domain_error("aggregate_q: factor/table count mismatch");
  }
  if (q_tables.empty()) return {};
  const std::size_t c = q_tables.front().size();
  std::vector<double> agg(c, 0.0);
  for (std::size_t j = 0; j < q_tables.size(); ++j) {
    if (q_tables[j].size() != c) {
      throw std::domain_error("aggregate_q: table length mismatch");
    }
    kernels::axpy(factors[j], q_tables[j], agg);
  }
  return agg;
}

double omega1(std::span<const double> p_now, std::span<const double> p_prev,
              const FederationConfig& cfg) {
  if (cfg.omega1_mode == Omega1Mode::fixed) return cfg.omega1_fixed;
  const double js = js_divergence(p_now, p_prev);
  return std::clamp(1.0 - js / std::log(2.0), 0.0, 1.0);
}

double omega2(std::int64_t epoch, double q_value, const FederationConfig& cfg) {
  const double q_norm = std::clamp(q_value / kRewardMax, 0.0, 1.0);
  return std::exp(-cfg.beta_decay * static_cast<double>(epoch)) *
         (1.0 - q_norm) / cfg.beta_scale;
}

void federated_update(std::span<double> q_local, std::span<const double> q_agg,
                      double w1, std::span<const double> w2) {
  if (q_local.size() != q_agg.size() || q_local.size() != w2.size()) {
    throw std::domain_error("federated_update: dimension mismatch");
  }
  kernels::combine(w1, q_local, w2, q_agg, q_local);
}

GateDecision latency_gate(LatencyCounter& counter, int threshold) {
  if (counter.value >= threshold) {
    counter.value = 0;
    return GateDecision::federate_and_reset;
  }
  ++counter.value;
  return GateDecision::defer_and_increment;
}

} // namespace uavsim
