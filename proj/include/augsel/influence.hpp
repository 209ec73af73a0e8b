#pragma once

#include <Eigen/Dense>
#include <vector>

#include "augsel/logistic.hpp"
#include "augsel/scores.hpp"

namespace augsel {

// Cholesky factorization of the (symmetric positive definite) objective
// Hessian, reused for every influence solve against one fit. Immutable after
// construction; concurrent solves are safe.
class HessianFactor {
 public:
  static HessianFactor factorize(const Eigen::MatrixXd& H);

  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& b) const;
  int dim() const { return static_cast<int>(llt_.matrixLLT().rows()); }
  double jitter() const { return jitter_; }  // 0 when no jitter was needed

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double jitter_ = 0.0;
};

// Influence of upweighting z on the loss at z_test:
//   -grad L(z_test)^T H^{-1} grad L(z)
double influence_up_loss(const ModelParams& params, const HessianFactor& factor,
                         const LabeledExample& z_test, const LabeledExample& z);

// Leave-one-out influence (the z_test == z case); always <= 0 because H is
// positive definite. The sign is kept; magnitudes are taken by score_all.
double loo_influence(const ModelParams& params, const HessianFactor& factor,
                     const LabeledExample& z);

// Exact retraining delta L(z_i, theta_without_i) - L(z_i, theta); a test
// oracle, never used by the selection path. Refits run Newton to the same
// tolerance as the base fit (warm-started; the minimizer is unique).
double brute_force_loo(const Dataset& data, const TrainConfig& config, int i);
std::vector<double> brute_force_loo_all(const Dataset& data, const TrainConfig& config);

// Scores for the ORIGINAL training points: loss -> point_loss, influence ->
// |loo_influence| (factor required).
ScoreVector score_all(const ModelParams& params, const HessianFactor* factor, const Dataset& data,
                      Metric metric, int model_version = 0);

}  // namespace augsel
