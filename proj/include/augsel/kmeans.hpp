#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "augsel/common.hpp"

namespace augsel {

struct KmeansResult {
  std::vector<int> assignments;  // one per point, in [0, k)
  Eigen::MatrixXd centroids;     // k x d
  double distortion = 0.0;       // sum of squared distances to assigned centroid
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ initialization, run to an assignment
// fixpoint or max_iter. Empty clusters are repaired by stealing the point
// farthest from its current centroid. Deterministic per seed.
KmeansResult kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, int k, std::uint64_t seed,
                    int max_iter = 300);

}  // namespace augsel
