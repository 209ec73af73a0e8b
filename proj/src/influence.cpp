#include "augsel/influence.hpp"

#include <cmath>

#include "augsel/textio.hpp"

namespace augsel {

HessianFactor HessianFactor::factorize(const Eigen::MatrixXd& H) {
  require(H.rows() == H.cols(), ErrorKind::invalid_argument, "Hessian must be square");
  const Eigen::Index n = H.rows();
  HessianFactor factor;
  factor.llt_.compute(H);
  if (factor.llt_.info() == Eigen::Success) return factor;

  const double base = 1e-9 * H.trace() / static_cast<double>(n);
  double delta = base;
  for (int k = 0; k <= 3; ++k) {
    Eigen::MatrixXd Hj = H;
    Hj.diagonal().array() += delta;
    factor.llt_.compute(Hj);
    if (factor.llt_.info() == Eigen::Success) {
      factor.jitter_ = delta;
      return factor;
    }
    delta *= 10.0;
  }
  raise(ErrorKind::conditioning,
        "Hessian is not positive definite even with jitter " + format_double(delta / 10.0));
}

Eigen::VectorXd HessianFactor::solve(const Eigen::Ref<const Eigen::VectorXd>& b) const {
  require(b.size() == llt_.matrixLLT().rows(), ErrorKind::invalid_argument,
          "right-hand side dimension mismatch");
  return llt_.solve(b);
}

double influence_up_loss(const ModelParams& params, const HessianFactor& factor,
                         const LabeledExample& z_test, const LabeledExample& z) {
  Eigen::VectorXd g_test = point_gradient(params, z_test);
  require(g_test.size() == factor.dim(), ErrorKind::invalid_argument,
          "factor was built for a different dimension");
  Eigen::VectorXd g = point_gradient(params, z);
  return -g_test.dot(factor.solve(g));
}

double loo_influence(const ModelParams& params, const HessianFactor& factor,
                     const LabeledExample& z) {
  return influence_up_loss(params, factor, z, z);
}

double brute_force_loo(const Dataset& data, const TrainConfig& config, int i) {
  require(i >= 0 && i < data.size(), ErrorKind::index, "example index out of range");
  ModelParams base = fit_logistic(data, config);
  DesignMatrix dm = to_design(data);
  const int n = data.size();
  Eigen::MatrixXd X(n - 1, data.feature_dim);
  Eigen::VectorXd y(n - 1), w(n - 1);
  int r = 0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    X.row(r) = dm.X.row(j);
    y[r] = dm.y[j];
    w[r++] = dm.w[j];
  }
  ModelParams refit = fit_logistic(X, y, w, config, &base);
  return point_loss(refit, data.examples[i]) - point_loss(base, data.examples[i]);
}

std::vector<double> brute_force_loo_all(const Dataset& data, const TrainConfig& config) {
  ModelParams base = fit_logistic(data, config);
  DesignMatrix dm = to_design(data);
  const int n = data.size();
  std::vector<double> deltas(static_cast<std::size_t>(n));
  Eigen::MatrixXd X(n - 1, data.feature_dim);
  Eigen::VectorXd y(n - 1), w(n - 1);
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      X.row(r) = dm.X.row(j);
      y[r] = dm.y[j];
      w[r++] = dm.w[j];
    }
    ModelParams refit = fit_logistic(X, y, w, config, &base);
    deltas[static_cast<std::size_t>(i)] =
        point_loss(refit, data.examples[i]) - point_loss(base, data.examples[i]);
  }
  return deltas;
}

ScoreVector score_all(const ModelParams& params, const HessianFactor* factor, const Dataset& data,
                      Metric metric, int model_version) {
  require(metric == Metric::loss || metric == Metric::influence, ErrorKind::invalid_argument,
          "score_all handles the loss and influence metrics only");
  ScoreVector scores;
  scores.metric = metric;
  scores.model_version = model_version;
  scores.values.reserve(data.examples.size());
  if (metric == Metric::loss) {
    for (const auto& ex : data.examples) scores.values.push_back(point_loss(params, ex));
  } else {
    require(factor != nullptr, ErrorKind::invalid_argument,
            "influence scores need a Hessian factorization");
    for (const auto& ex : data.examples)
      scores.values.push_back(std::abs(loo_influence(params, *factor, ex)));
  }
  return scores;
}

}  // namespace augsel
