#include "augsel/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace augsel {

std::vector<int> sample_uniform(int n, int k, rng::Engine& eng) {
  require(n >= 0 && k >= 0, ErrorKind::invalid_argument, "n and k must be nonnegative");
  require(k <= n, ErrorKind::size, "cannot sample more indices than available");
  auto raw = rng::sample_indices(eng, static_cast<std::size_t>(n), static_cast<std::size_t>(k));
  return std::vector<int>(raw.begin(), raw.end());
}

std::vector<int> sample_proportional(const ScoreVector& scores, int k, rng::Engine& eng) {
  const int n = scores.size();
  require(k >= 0 && k <= n, ErrorKind::size, "cannot sample more indices than available");
  scores.validate();
  std::vector<int> remaining(static_cast<std::size_t>(n));
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  while (static_cast<int>(out.size()) < k) {
    double total = 0.0;
    for (int i : remaining) total += scores.values[static_cast<std::size_t>(i)];
    std::size_t pick;
    if (total > 0.0) {
      double u = rng::uniform01(eng) * total;
      double cum = 0.0;
      pick = remaining.size() - 1;  // guard against rounding at the top end
      for (std::size_t j = 0; j < remaining.size(); ++j) {
        cum += scores.values[static_cast<std::size_t>(remaining[j])];
        if (u < cum) {
          pick = j;
          break;
        }
      }
    } else {
      pick = rng::below(eng, remaining.size());
    }
    out.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

std::vector<int> select_topk(const ScoreVector& scores, int k) {
  const int n = scores.size();
  require(k >= 0 && k <= n, ErrorKind::size, "cannot select more indices than available");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double sa = scores.values[static_cast<std::size_t>(a)];
    double sb = scores.values[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

ScoreVector invert_scores(const ScoreVector& scores) {
  scores.validate();
  double max_s = 0.0;
  for (double v : scores.values) max_s = std::max(max_s, v);
  const double eps = max_s > 0.0 ? 1e-12 * max_s : 1e-12;
  ScoreVector out = scores;
  out.inverted = !scores.inverted;
  for (double& v : out.values) v = 1.0 / (v + eps);
  return out;
}

std::vector<int> vsv_select(const SvmFit& svm) {
  std::vector<int> out = svm.support_indices;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> stratified_select(const std::vector<int>& assignments, int n_clusters,
                                   const ScoreVector* scores, rng::Engine& eng) {
  require(n_clusters >= 1, ErrorKind::invalid_argument, "need at least one cluster");
  if (scores)
    require(scores->size() == static_cast<int>(assignments.size()), ErrorKind::invalid_argument,
            "score vector length does not match assignments");
  std::vector<std::vector<int>> clusters(static_cast<std::size_t>(n_clusters));
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    int c = assignments[i];
    require(c >= 0 && c < n_clusters, ErrorKind::index, "assignment out of range");
    clusters[static_cast<std::size_t>(c)].push_back(static_cast<int>(i));
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n_clusters));
  for (int c = 0; c < n_clusters; ++c) {
    const auto& members = clusters[static_cast<std::size_t>(c)];
    require(!members.empty(), ErrorKind::data, "cluster " + std::to_string(c) + " is empty");
    if (!scores) {
      out.push_back(members[rng::below(eng, members.size())]);
    } else {
      double total = 0.0;
      for (int i : members) total += scores->values[static_cast<std::size_t>(i)];
      if (total <= 0.0) {
        out.push_back(members[rng::below(eng, members.size())]);
      } else {
        double u = rng::uniform01(eng) * total;
        double cum = 0.0;
        int pick = members.back();
        for (int i : members) {
          cum += scores->values[static_cast<std::size_t>(i)];
          if (u < cum) {
            pick = i;
            break;
          }
        }
        out.push_back(pick);
      }
    }
  }
  return out;
}

Dataset apply_downweight(const Dataset& data, const AugmentationFamily& family,
                         bool literal_divisor) {
  require(family.origin_id >= 0 && family.origin_id < data.size(), ErrorKind::index,
          "family origin is not in the dataset");
  require(!family.members.empty(), ErrorKind::invalid_argument, "family has no members");
  Dataset out = data;
  const int m = static_cast<int>(family.members.size());
  const double w0 = out.examples[static_cast<std::size_t>(family.origin_id)].weight;
  const double share = w0 / static_cast<double>(literal_divisor ? m : m + 1);
  out.examples[static_cast<std::size_t>(family.origin_id)].weight = share;
  for (const LabeledExample& member : family.members) {
    LabeledExample ex = member;
    ex.weight = share;
    ex.origin_id = family.origin_id;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace augsel
