#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "augsel/dataset.hpp"

namespace augsel {

// Objective: J(theta) = C * sum_i w_i * log(1 + exp(-y_i f(x_i))) + 0.5*||w||^2
// with f(x) = w.x + b and the bias unregularized.
struct TrainConfig {
  double C = 10.0;
  double tol = 1e-8;  // infinity-norm gradient threshold
  int max_iter = 100;

  void validate() const;
};

struct ModelParams {
  Eigen::VectorXd weights;
  double bias = 0.0;

  double decision(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return weights.dot(x) + bias;
  }
};

void save_model(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

// Damped Newton (Armijo backtracking) from zero initialization; deterministic.
// Throws a convergence error carrying the final gradient norm when max_iter
// is exhausted, and a data error on degenerate input.
ModelParams fit_logistic(const Dataset& data, const TrainConfig& config);
ModelParams fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXd>& y,
                         const Eigen::Ref<const Eigen::VectorXd>& w, const TrainConfig& config,
                         const ModelParams* warm_start = nullptr);

// Unweighted, unregularized logistic loss at one point (log1p-stable).
double point_loss(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& x, int label);
double point_loss(const ModelParams& params, const LabeledExample& z);

// Gradient of point_loss w.r.t. (weights, bias); dimension feature_dim + 1,
// bias component last.
Eigen::VectorXd point_gradient(const ModelParams& params,
                               const Eigen::Ref<const Eigen::VectorXd>& x, int label);
Eigen::VectorXd point_gradient(const ModelParams& params, const LabeledExample& z);

// Hessian of the full regularized objective at `params`:
//   C * sum_i w_i p_i (1-p_i) a_i a_i^T + diag(1,...,1,0),  a_i = (x_i, 1).
Eigen::MatrixXd hessian(const ModelParams& params, const Dataset& data, const TrainConfig& config);
Eigen::MatrixXd hessian(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& w, double C);

// Value and gradient of the full objective (exposed for the test oracles).
double objective_value(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXd>& y,
                       const Eigen::Ref<const Eigen::VectorXd>& w, double C);
Eigen::VectorXd objective_gradient(const ModelParams& params,
                                   const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::VectorXd>& y,
                                   const Eigen::Ref<const Eigen::VectorXd>& w, double C);

// Unweighted fraction with sign(f(x)) == y; f(x) == 0 counts as +1.
double accuracy(const ModelParams& params, const Dataset& data);
double accuracy(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
                const Eigen::Ref<const Eigen::VectorXd>& y);

struct CvResult {
  double best_C = 0.0;
  std::vector<double> grid;            // deduplicated, ascending
  std::vector<double> mean_accuracy;   // aligned with grid
  std::vector<std::string> warnings;   // skipped folds etc.
};

// k-fold cross validation over C; ties break toward smaller C (stronger
// regularization). Folds whose training part is single-class are skipped.
CvResult cross_validate_C(const Dataset& data, std::vector<double> grid, int folds,
                          std::uint64_t seed, const TrainConfig& base);

// Shared fold assignment (shuffled, near-equal block sizes).
std::vector<std::vector<int>> kfold_indices(int n, int folds, std::uint64_t seed);

}  // namespace augsel
