#pragma once

#include <vector>

#include "augsel/augment.hpp"
#include "augsel/rng.hpp"
#include "augsel/scores.hpp"
#include "augsel/svm.hpp"

namespace augsel {

// k distinct indices from [0, n), uniform without replacement.
std::vector<int> sample_uniform(int n, int k, rng::Engine& eng);

// Sequential renormalized draws: each draw picks i with probability
// s_i / sum of remaining scores, then removes i. Once the remaining positive
// mass is exhausted, the rest is filled uniformly from zero-score indices.
std::vector<int> sample_proportional(const ScoreVector& scores, int k, rng::Engine& eng);

// Indices of the k largest scores, descending; ties break by ascending index.
std::vector<int> select_topk(const ScoreVector& scores, int k);

// s_i' = 1/(s_i + eps), eps = 1e-12 * max(s) (1e-12 when all scores are 0).
ScoreVector invert_scores(const ScoreVector& scores);

// The support set, ascending. The budget of this policy is the support count.
std::vector<int> vsv_select(const SvmFit& svm);

// One index per cluster (clusters 0..n_clusters-1 must all be nonempty);
// uniform within a cluster, or proportional to scores when given.
std::vector<int> stratified_select(const std::vector<int>& assignments, int n_clusters,
                                   const ScoreVector* scores, rng::Engine& eng);

// Appends the family's members and splits the origin's weight across origin
// plus members so total dataset weight is conserved. With `literal_divisor`
// the divisor is the member count m alone rather than m+1 (the conserving
// choice); exposed for comparison only.
Dataset apply_downweight(const Dataset& data, const AugmentationFamily& family,
                         bool literal_divisor = false);

}  // namespace augsel
