#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uavsim/content_demand.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {

// Upper bound on the per-epoch reward magnitude: local, ferrying and
// global components each lie in [-1, 1].
inline constexpr double kRewardMax = 3.0;

// Epoch feedback for one anchor's agent. served_* flags are indexed by
// content id; the per-anchor vectors are indexed by anchor id (entries
// for anchors without data may stay empty and contribute nothing).
struct RewardInputs {
  std::vector<bool> served_local;
  std::vector<std::vector<bool>> served_ferry;
  std::vector<std::vector<bool>> served_global;
  double delta_local = 0.0;
  std::vector<double> delta_ferry;
  std::vector<double> delta_global;
  bool mf_present = true;
  int n_anchor = 1;
  AnchorId self_anchor = 0;
};

// Reward for having (or not having) content i available locally:
// +1 when i was served and availability did not drop, -1 when i went
// unserved while availability dropped, 0 otherwise.
double reward_local(ContentId i, const RewardInputs& in);

// Mean of the same credit/penalty over the remote anchors' ferried
// service sets. 0 when there is a single anchor.
double reward_ferry(ContentId i, const RewardInputs& in);

// Mean of the credit/penalty over every anchor's overall service sets.
double reward_global(ContentId i, const RewardInputs& in);

// One anchor's Top-k learner.
struct AgentState {
  std::vector<double> q;           // Q-value per content
  std::vector<double> pull_count;  // times each content was requested
  std::int64_t epoch = 0;
  double learn_rate = 0.1;
  double zeta_ucb = 2.0;
  double epsilon = 0.3;
  double epsilon_decay = 0.99;
  double epsilon_floor = 0.01;
  int cache_capacity = 0;

  explicit AgentState(int catalog_size = 0)
      : q(catalog_size, 0.0), pull_count(catalog_size, 0.0) {}

  void decay_epsilon() {
    epsilon = std::max(epsilon * epsilon_decay, epsilon_floor);
  }
};

// Recursive Q update; ferry and global rewards only count while a ferry
// is in communication range. Returns the new q(i).
double q_update(AgentState& state, ContentId i, const RewardInputs& in);

// UCB score per content: q + sqrt(zeta * ln(epoch) / pulls), with
// never-requested contents scored +infinity.
std::vector<double> ucb_scores(const AgentState& state);

// Top-k selection with epsilon-greedy perturbation: with probability
// 1 - eps the k best-scored contents (ties to the lower id); otherwise
// ceil(eps * k) of those slots are replaced by uniformly drawn
// non-selected contents. Always returns exactly k distinct ids, sorted.
std::vector<ContentId> select_cache_set(std::span<const double> scores, int k,
                                        double eps, RandomStream& rng);

} // namespace uavsim
