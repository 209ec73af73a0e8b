#include "augsel/svm.hpp"

#include <cmath>

#include "augsel/logistic.hpp"
#include "augsel/rng.hpp"

namespace augsel {

namespace {

constexpr double kSupportTol = 1e-6;

struct DualSolution {
  Eigen::VectorXd w;  // d+1, bias last
};

// Dual coordinate descent for the L1-loss SVM (liblinear algorithm), with the
// bias as an augmented constant feature and per-example box constraints C*w_i.
DualSolution solve_dual(const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& y,
                        const Eigen::Ref<const Eigen::VectorXd>& cost, std::uint64_t seed) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd qdiag(n);
  for (Eigen::Index i = 0; i < n; ++i) qdiag[i] = X.row(i).squaredNorm() + 1.0;

  std::vector<int> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);
  auto eng = rng::make_engine(seed);

  const double eps = 1e-10;
  const int max_sweeps = 20000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    rng::shuffle(eng, order);
    double max_violation = 0.0;
    for (int i : order) {
      const double U = cost[i];
      if (U <= 0.0) continue;
      const double f = w.head(d).dot(X.row(i)) + w[d];
      const double G = y[i] * f - 1.0;
      double pg = G;
      if (alpha[i] <= 0.0)
        pg = std::min(G, 0.0);
      else if (alpha[i] >= U)
        pg = std::max(G, 0.0);
      max_violation = std::max(max_violation, std::abs(pg));
      if (std::abs(pg) > 1e-14) {
        const double old = alpha[i];
        alpha[i] = std::min(std::max(alpha[i] - G / qdiag[i], 0.0), U);
        const double delta = (alpha[i] - old) * y[i];
        if (delta != 0.0) {
          w.head(d) += delta * X.row(i).transpose();
          w[d] += delta;
        }
      }
    }
    if (max_violation < eps) return {std::move(w)};
  }
  raise(ErrorKind::convergence, "SVM dual coordinate descent did not converge");
}

double svm_accuracy(const Eigen::VectorXd& w, const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y) {
  const Eigen::Index d = X.cols();
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double f = w.head(d).dot(X.row(i)) + w[d];
    int pred = f >= 0.0 ? 1 : -1;
    if (pred == static_cast<int>(y[i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(X.rows());
}

}  // namespace

SvmFit fit_svm_fixed_C(const Dataset& data, double C, std::uint64_t seed) {
  require(C > 0.0 && std::isfinite(C), ErrorKind::invalid_argument, "C must be positive");
  data.validate_for_fit();
  DesignMatrix dm = to_design(data);
  Eigen::VectorXd cost = C * dm.w;
  DualSolution sol = solve_dual(dm.X, dm.y, cost, seed);

  SvmFit fit;
  const Eigen::Index d = dm.X.cols();
  fit.weights = sol.w.head(d);
  fit.bias = sol.w[d];
  fit.chosen_C = C;
  for (Eigen::Index i = 0; i < dm.X.rows(); ++i) {
    double margin = dm.y[i] * (fit.weights.dot(dm.X.row(i)) + fit.bias);
    if (margin <= 1.0 + kSupportTol) fit.support_indices.push_back(static_cast<int>(i));
  }
  return fit;
}

SvmFit fit_svm(const Dataset& data, std::vector<double> grid, int folds, std::uint64_t seed) {
  require(!grid.empty(), ErrorKind::invalid_argument, "C grid must be nonempty");
  for (double c : grid)
    require(c > 0.0 && std::isfinite(c), ErrorKind::invalid_argument, "grid entries must be positive");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  data.validate_for_fit();

  const int n = data.size();
  DesignMatrix dm = to_design(data);
  auto fold_sets = kfold_indices(n, folds, rng::derive(seed, {1}));

  std::vector<char> usable(fold_sets.size(), 1);
  int n_usable = 0;
  for (std::size_t f = 0; f < fold_sets.size(); ++f) {
    std::vector<char> in_fold(n, 0);
    for (int i : fold_sets[f]) in_fold[i] = 1;
    double w_pos = 0.0, w_neg = 0.0;
    for (int i = 0; i < n; ++i)
      if (!in_fold[i]) (dm.y[i] > 0 ? w_pos : w_neg) += dm.w[i];
    usable[f] = (w_pos > 0.0 && w_neg > 0.0) ? 1 : 0;
    n_usable += usable[f];
  }
  require(n_usable > 0, ErrorKind::data, "all cross-validation folds were skipped");

  double best_acc = -1.0;
  double best_C = grid.front();
  for (double C : grid) {
    double acc_sum = 0.0;
    for (std::size_t f = 0; f < fold_sets.size(); ++f) {
      if (!usable[f]) continue;
      std::vector<char> in_fold(n, 0);
      for (int i : fold_sets[f]) in_fold[i] = 1;
      const int n_val = static_cast<int>(fold_sets[f].size());
      const int n_train = n - n_val;
      Eigen::MatrixXd Xtr(n_train, data.feature_dim), Xva(n_val, data.feature_dim);
      Eigen::VectorXd ytr(n_train), ctr(n_train), yva(n_val);
      int a = 0, b = 0;
      for (int i = 0; i < n; ++i) {
        if (in_fold[i]) {
          Xva.row(b) = dm.X.row(i);
          yva[b++] = dm.y[i];
        } else {
          Xtr.row(a) = dm.X.row(i);
          ytr[a] = dm.y[i];
          ctr[a++] = C * dm.w[i];
        }
      }
      DualSolution sol = solve_dual(Xtr, ytr, ctr, rng::derive(seed, {2, f}));
      acc_sum += svm_accuracy(sol.w, Xva, yva);
    }
    double mean = acc_sum / n_usable;
    if (mean > best_acc) {  // strict: ties keep the smaller C (grid ascends)
      best_acc = mean;
      best_C = C;
    }
  }
  return fit_svm_fixed_C(data, best_C, rng::derive(seed, {3}));
}

ScoreVector margin_scores(const SvmFit& svm, const Dataset& data, MarginVariant variant) {
  require(svm.weights.size() == data.feature_dim, ErrorKind::invalid_argument,
          "SVM dimension does not match dataset");
  ScoreVector scores;
  scores.metric = variant == MarginVariant::absolute ? Metric::margin_abs : Metric::margin_inv;
  scores.values.reserve(data.examples.size());
  double max_abs = 0.0;
  std::vector<double> margins;
  margins.reserve(data.examples.size());
  for (const auto& ex : data.examples) {
    double m = std::abs(svm.decision(ex.features));
    margins.push_back(m);
    max_abs = std::max(max_abs, m);
  }
  if (variant == MarginVariant::absolute) {
    scores.values = std::move(margins);
  } else {
    const double eps = max_abs > 0.0 ? 1e-12 * max_abs : 1e-12;
    for (double m : margins) scores.values.push_back(1.0 / (m + eps));
  }
  return scores;
}

}  // namespace augsel
