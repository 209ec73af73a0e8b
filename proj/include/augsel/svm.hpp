#pragma once

#include <Eigen/Dense>
#include <vector>

#include "augsel/dataset.hpp"
#include "augsel/scores.hpp"

namespace augsel {

// Linear hinge-loss SVM fit by dual coordinate descent. Objective:
//   0.5*(||w||^2 + b^2) + C * sum_i w_i * max(0, 1 - y_i f(x_i))
// (bias handled as an augmented constant feature, liblinear-style).
struct SvmFit {
  Eigen::VectorXd weights;
  double bias = 0.0;
  std::vector<int> support_indices;  // { i : y_i f(x_i) <= 1 + 1e-6 }, ascending
  double chosen_C = 0.0;

  double decision(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return weights.dot(x) + bias;
  }
};

// C chosen by k-fold cross-validated accuracy over `grid` (ties toward the
// smaller C), then refit on all data.
SvmFit fit_svm(const Dataset& data, std::vector<double> grid, int folds, std::uint64_t seed);
SvmFit fit_svm_fixed_C(const Dataset& data, double C, std::uint64_t seed);

enum class MarginVariant { absolute, inverse };

// absolute: s_i = |f(x_i)|; inverse: s_i = 1/(|f(x_i)| + eps) with
// eps = 1e-12 * max_j |f(x_j)| (1e-12 when all margins are zero).
ScoreVector margin_scores(const SvmFit& svm, const Dataset& data, MarginVariant variant);

}  // namespace augsel
