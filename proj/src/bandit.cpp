#include "uavsim/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "uavsim/kernels.hpp"

namespace uavsim {

namespace {

inline bool member(const std::vector<bool>& flags, ContentId i) {
  return static_cast<std::size_t>(i) < flags.size() && flags[i];
}

inline double bracket_pair(bool in_set, double delta) {
  if (in_set && delta >= 0.0) return 1.0;
  if (!in_set && delta < 0.0) return -1.0;
  return 0.0;
}

} // namespace

double reward_local(ContentId i, const RewardInputs& in) {
  return bracket_pair(member(in.served_local, i), in.delta_local);
}

double reward_ferry(ContentId i, const RewardInputs& in) {
  if (in.n_anchor < 2) return 0.0;
  double acc = 0.0;
  for (int j = 0; j < in.n_anchor; ++j) {
    if (j == in.self_anchor) continue;
    const bool in_set = j < static_cast<int>(in.served_ferry.size()) &&
                        member(in.served_ferry[j], i);
    const double delta =
        j < static_cast<int>(in.delta_ferry.size()) ? in.delta_ferry[j] : 0.0;
    acc += bracket_pair(in_set, delta);
  }
  return acc / (in.n_anchor - 1);
}

double reward_global(ContentId i, const RewardInputs& in) {
  double acc = 0.0;
  for (int j = 0; j < in.n_anchor; ++j) {
    const bool in_set = j < static_cast<int>(in.served_global.size()) &&
                        member(in.served_global[j], i);
    const double delta =
        j < static_cast<int>(in.delta_global.size()) ? in.delta_global[j] : 0.0;
    acc += bracket_pair(in_set, delta);
  }
  return acc / in.n_anchor;
}

double q_update(AgentState& state, ContentId i, const RewardInputs& in) {
  const double gate = in.mf_present ? 1.0 : 0.0;
  const double reward =
      reward_local(i, in) + gate * (reward_ferry(i, in) + reward_global(i, in));
  const double updated =
      (1.0 - state.learn_rate) * state.q[i] + state.learn_rate * reward;
  state.q[i] = updated;
  return updated;
}

std::vector<double> ucb_scores(const AgentState& state) {
  if (state.epoch < 1) {
    throw std::logic_error("ucb_scores: epoch must be >= 1");
  }
  std::vector<double> scores(state.q.size());
  const double c = state.zeta_ucb * std::log(static_cast<double>(state.epoch));
  kernels::ucb_fill(state.q, state.pull_count, c, scores);
  return scores;
}

std::vector<ContentId> select_cache_set(std::span<const double> scores, int k,
                                        double eps, RandomStream& rng) {
  const int c = static_cast<int>(scores.size());
  if (k > c) {
    throw std::runtime_error("select_cache_set: k " + std::to_string(k) +
                             " exceeds catalog size " + std::to_string(c));
  }
  if (k < 0) throw std::runtime_error("select_cache_set: negative k");
  std::vector<ContentId> ids(c);
  std::iota(ids.begin(), ids.end(), 0);
  std::partial_sort(ids.begin(), ids.begin() + k, ids.end(),
                    [&](ContentId a, ContentId b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  std::vector<ContentId> chosen(ids.begin(), ids.begin() + k);

  if (eps > 0.0 && k > 0 && k < c && rng.u01() < eps) {
    const int swaps = static_cast<int>(std::ceil(eps * k));
    std::vector<char> selected(c, 0);
    for (ContentId id : chosen) selected[id] = 1;
    // Distinct slots to replace, drawn uniformly from the k selected.
    std::vector<int> slots(k);
    std::iota(slots.begin(), slots.end(), 0);
    for (int s = 0; s < swaps && s < k; ++s) {
      const int pick =
          s + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k - s)));
      std::swap(slots[s], slots[pick]);
    }
    for (int s = 0; s < swaps && s < k; ++s) {
      // Uniform replacement from the non-selected contents.
      ContentId repl;
      do {
        repl = static_cast<ContentId>(rng.uniform_int(c));
      } while (selected[repl]);
      selected[chosen[slots[s]]] = 0;
      selected[repl] = 1;
      chosen[slots[s]] = repl;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

} // namespace uavsim
