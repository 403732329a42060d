#include "uavsim/content_demand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uavsim/kernels.hpp"

namespace uavsim {

double zipf_popularity(int rank, double alpha, int catalog_size) {
  if (rank < 1 || rank > catalog_size) {
    throw std::domain_error("zipf_popularity: rank " + std::to_string(rank) +
                            " outside [1, " + std::to_string(catalog_size) +
                            "]");
  }
  double norm = 0.0;
  for (int k = 1; k <= catalog_size; ++k) {
    norm += std::pow(1.0 / k, alpha);
  }
  return std::pow(1.0 / rank, alpha) / norm;
}

Catalog make_catalog(int catalog_size, double zipf_alpha) {
  if (catalog_size <= 0) {
    throw std::invalid_argument("make_catalog: catalog_size must be positive");
  }
  Catalog cat;
  cat.catalog_size = catalog_size;
  cat.zipf_alpha = zipf_alpha;
  cat.base_popularity.resize(catalog_size);
  for (int k = 1; k <= catalog_size; ++k) {
    cat.base_popularity[k - 1] = std::pow(1.0 / k, zipf_alpha);
  }
  const double norm = kernels::reduce_sum(cat.base_popularity);
  for (double& p : cat.base_popularity) p /= norm;
  return cat;
}

long long smith_waterman(std::span<const ContentId> a,
                         std::span<const ContentId> b) {
  constexpr long long kMatch = 2;
  constexpr long long kMismatch = -1;
  constexpr long long kGap = -1;
  if (a.empty() || b.empty()) return 0;

  std::vector<long long> prev(b.size() + 1, 0);
  std::vector<long long> cur(b.size() + 1, 0);
  long long best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const long long diag =
          prev[j - 1] + (a[i - 1] == b[j - 1] ? kMatch : kMismatch);
      const long long up = prev[j] + kGap;
      const long long left = cur[j - 1] + kGap;
      cur[j] = std::max({0LL, diag, up, left});
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

CommunityProfile derive_heterogeneous_profile(const Catalog& base,
                                              double swap_probability,
                                              double min_distance,
                                              std::uint64_t seed) {
  const int c = base.catalog_size;
  constexpr int kWindow = 10;
  constexpr int kMaxRetries = 1000;

  std::vector<ContentId> identity(c);
  for (int i = 0; i < c; ++i) identity[i] = i;

  // Similarity threshold implied by min_distance: identity scores
  // 2*C under match=+2, so distance d means similarity <= 2*C - d.
  const double threshold = 2.0 * c - min_distance;

  RandomStream rng(derive_seed(seed, 0x70726F66ULL));  // "prof"
  std::vector<ContentId> perm;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    perm = identity;
    if (swap_probability > 0.0) {
      for (int i = 0; i < c; ++i) {
        if (rng.u01() < swap_probability) {
          const int lo = std::max(0, i - kWindow);
          const int hi = std::min(c - 1, i + kWindow);
          const int j = static_cast<int>(rng.uniform_range(lo, hi));
          std::swap(perm[i], perm[j]);
        }
      }
    }
    const double similarity =
        static_cast<double>(smith_waterman(identity, perm));
    if (similarity <= threshold) {
      CommunityProfile profile;
      profile.rank_permutation = std::move(perm);
      return profile;
    }
  }
  throw std::runtime_error(
      "derive_heterogeneous_profile: could not reach Smith-Waterman "
      "similarity <= " +
      std::to_string(threshold) + " (min_distance " +
      std::to_string(min_distance) + ") after " +
      std::to_string(kMaxRetries) + " attempts");
}

RequestSampler::RequestSampler(const CommunityProfile& profile,
                               const Catalog& catalog,
                               double trajectory_period)
    : profile_(&profile), trajectory_period_(trajectory_period) {
  const int c = catalog.catalog_size;
  if (static_cast<int>(profile.rank_permutation.size()) != c) {
    throw std::invalid_argument(
        "RequestSampler: permutation length does not match catalog");
  }
  popularity_.assign(c, 0.0);
  cdf_.resize(c);
  double acc = 0.0;
  for (int r = 0; r < c; ++r) {
    const ContentId id = profile.rank_permutation[r];
    popularity_[id] = catalog.base_popularity[r];
    acc += catalog.base_popularity[r];
    cdf_[r] = acc;
  }
  cdf_.back() = 1.0;
}

double RequestSampler::tad_seconds(ContentId c) const {
  return profile_->tad_rule.ratio_for(c) * trajectory_period_;
}

std::pair<Request, double> RequestSampler::sample(double now,
                                                  RandomStream& rng) const {
  const double next = now + rng.exponential(profile_->request_rate);
  const double u = rng.u01();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const int rank = static_cast<int>(
      std::min<std::ptrdiff_t>(it - cdf_.begin(),
                               static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  const ContentId content = profile_->rank_permutation[rank];
  Request req;
  req.community_id = profile_->community_id;
  req.content_id = content;
  req.issue_time = now;
  req.tad = tad_seconds(content);
  return {req, next};
}

std::pair<Request, double> sample_request(const CommunityProfile& profile,
                                          const Catalog& catalog,
                                          double trajectory_period, double now,
                                          RandomStream& rng) {
  RequestSampler sampler(profile, catalog, trajectory_period);
  return sampler.sample(now, rng);
}

} // namespace uavsim
