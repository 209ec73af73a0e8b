#include "augsel/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "augsel/rng.hpp"
#include "augsel/textio.hpp"

namespace augsel {

namespace {

// log(1 + exp(-m)) without overflow for any m
inline double log1pexp_neg(double m) {
  return m >= 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

// sigma(t) = 1/(1+exp(-t)), stable on both tails
inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

void check_fit_inputs(const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& w) {
  require(X.rows() > 0, ErrorKind::data, "dataset is empty");
  require(X.rows() == y.size() && X.rows() == w.size(), ErrorKind::data,
          "design matrix, labels and weights disagree in length");
  double w_pos = 0.0, w_neg = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    require(w[i] >= 0.0 && std::isfinite(w[i]), ErrorKind::data,
            "weights must be finite and nonnegative");
    (y[i] > 0 ? w_pos : w_neg) += w[i];
  }
  require(w_pos + w_neg > 0.0, ErrorKind::data, "total weight must be positive");
  require(w_pos > 0.0 && w_neg > 0.0, ErrorKind::data,
          "both classes must be present with positive weight");
}

}  // namespace

void TrainConfig::validate() const {
  require(C > 0.0 && std::isfinite(C), ErrorKind::invalid_argument, "C must be positive");
  require(tol > 0.0, ErrorKind::invalid_argument, "tol must be positive");
  require(max_iter >= 1, ErrorKind::invalid_argument, "max_iter must be at least 1");
}

void save_model(const ModelParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open for writing: " + path.string());
  out << "augsel-model 1\n" << params.weights.size() << '\n';
  for (Eigen::Index i = 0; i < params.weights.size(); ++i)
    out << format_double(params.weights[i]) << '\n';
  out << format_double(params.bias) << '\n';
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open: " + path.string());
  std::string tag;
  int version = 0;
  in >> tag >> version;
  require(static_cast<bool>(in) && tag == "augsel-model" && version == 1, ErrorKind::format,
          "not an augsel model file: " + path.string());
  Eigen::Index dim = 0;
  in >> dim;
  require(static_cast<bool>(in) && dim > 0, ErrorKind::format, "bad model dimension");
  ModelParams params;
  params.weights.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) in >> params.weights[i];
  in >> params.bias;
  require(static_cast<bool>(in), ErrorKind::format, "truncated model file: " + path.string());
  return params;
}

double objective_value(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXd>& y,
                       const Eigen::Ref<const Eigen::VectorXd>& w, double C) {
  Eigen::VectorXd f = X * params.weights;
  f.array() += params.bias;
  double data_term = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) data_term += w[i] * log1pexp_neg(y[i] * f[i]);
  return C * data_term + 0.5 * params.weights.squaredNorm();
}

Eigen::VectorXd objective_gradient(const ModelParams& params,
                                   const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::VectorXd>& y,
                                   const Eigen::Ref<const Eigen::VectorXd>& w, double C) {
  const Eigen::Index d = X.cols();
  Eigen::VectorXd f = X * params.weights;
  f.array() += params.bias;
  Eigen::VectorXd r(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) r[i] = -y[i] * sigmoid(-y[i] * f[i]) * w[i];
  Eigen::VectorXd g(d + 1);
  g.head(d) = C * (X.transpose() * r) + params.weights;
  g[d] = C * r.sum();
  return g;
}

Eigen::MatrixXd hessian(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& w, double C) {
  const Eigen::Index d = X.cols();
  Eigen::VectorXd f = X * params.weights;
  f.array() += params.bias;
  Eigen::VectorXd s(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double p = sigmoid(f[i]);
    s[i] = C * w[i] * p * (1.0 - p);
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d + 1, d + 1);
  Eigen::MatrixXd Xs = s.cwiseSqrt().asDiagonal() * X;
  H.topLeftCorner(d, d).selfadjointView<Eigen::Lower>().rankUpdate(Xs.transpose());
  H.topLeftCorner(d, d).triangularView<Eigen::Upper>() =
      H.topLeftCorner(d, d).triangularView<Eigen::Lower>().transpose();
  H.topLeftCorner(d, d).diagonal().array() += 1.0;
  H.block(0, d, d, 1) = X.transpose() * s;
  H.block(d, 0, 1, d) = H.block(0, d, d, 1).transpose();
  H(d, d) = s.sum();
  return H;
}

Eigen::MatrixXd hessian(const ModelParams& params, const Dataset& data, const TrainConfig& config) {
  config.validate();
  DesignMatrix dm = to_design(data);
  return hessian(params, dm.X, dm.w, config.C);
}

ModelParams fit_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXd>& y,
                         const Eigen::Ref<const Eigen::VectorXd>& w, const TrainConfig& config,
                         const ModelParams* warm_start) {
  config.validate();
  check_fit_inputs(X, y, w);
  const Eigen::Index d = X.cols();
  ModelParams params;
  if (warm_start) {
    require(warm_start->weights.size() == d, ErrorKind::invalid_argument,
            "warm start dimension mismatch");
    params = *warm_start;
  } else {
    params.weights = Eigen::VectorXd::Zero(d);
    params.bias = 0.0;
  }

  double grad_norm = 0.0;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    Eigen::VectorXd g = objective_gradient(params, X, y, w, config.C);
    grad_norm = g.lpNorm<Eigen::Infinity>();
    if (grad_norm <= config.tol) return params;

    Eigen::MatrixXd H = hessian(params, X, w, config.C);
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) {
      // saturated fits can drive the bias curvature to zero; nudge and retry
      H.diagonal().array() += 1e-10 * (1.0 + H.trace() / (d + 1));
      llt.compute(H);
      require(llt.info() == Eigen::Success, ErrorKind::conditioning,
              "Newton system is not positive definite");
    }
    Eigen::VectorXd dir = llt.solve(-g);

    const double j0 = objective_value(params, X, y, w, config.C);
    const double slope = g.dot(dir);  // negative for a descent direction
    // slack absorbs FP noise so sub-resolution decreases still accept the step
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(j0);
    double t = 1.0;
    ModelParams trial;
    for (;;) {
      trial.weights = params.weights + t * dir.head(d);
      trial.bias = params.bias + t * dir[d];
      if (objective_value(trial, X, y, w, config.C) <= j0 + 1e-4 * t * slope + slack) break;
      t *= 0.5;
      require(t >= 0x1.0p-60, ErrorKind::convergence, "line search failed to make progress");
    }
    params = std::move(trial);
  }
  Eigen::VectorXd g = objective_gradient(params, X, y, w, config.C);
  grad_norm = g.lpNorm<Eigen::Infinity>();
  if (grad_norm <= config.tol) return params;
  raise(ErrorKind::convergence, "Newton did not converge in " + std::to_string(config.max_iter) +
                                    " iterations (gradient norm " + format_double(grad_norm) + ")");
}

ModelParams fit_logistic(const Dataset& data, const TrainConfig& config) {
  data.validate_for_fit();
  DesignMatrix dm = to_design(data);
  return fit_logistic(dm.X, dm.y, dm.w, config);
}

double point_loss(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& x,
                  int label) {
  return log1pexp_neg(label * params.decision(x));
}

double point_loss(const ModelParams& params, const LabeledExample& z) {
  return point_loss(params, z.features, z.label);
}

Eigen::VectorXd point_gradient(const ModelParams& params,
                               const Eigen::Ref<const Eigen::VectorXd>& x, int label) {
  const double m = label * params.decision(x);
  const double g = -label * sigmoid(-m);
  Eigen::VectorXd grad(x.size() + 1);
  grad.head(x.size()) = g * x;
  grad[x.size()] = g;
  return grad;
}

Eigen::VectorXd point_gradient(const ModelParams& params, const LabeledExample& z) {
  return point_gradient(params, z.features, z.label);
}

double accuracy(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& X,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
  require(X.rows() > 0, ErrorKind::data, "cannot score an empty dataset");
  Eigen::VectorXd f = X * params.weights;
  f.array() += params.bias;
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    int pred = f[i] >= 0.0 ? 1 : -1;  // ties go to +1
    if (pred == static_cast<int>(y[i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(X.rows());
}

double accuracy(const ModelParams& params, const Dataset& data) {
  require(!data.examples.empty(), ErrorKind::data, "cannot score an empty dataset");
  DesignMatrix dm = to_design(data);
  return accuracy(params, dm.X, dm.y);
}

std::vector<std::vector<int>> kfold_indices(int n, int folds, std::uint64_t seed) {
  require(folds >= 2, ErrorKind::invalid_argument, "need at least 2 folds");
  require(folds <= n, ErrorKind::invalid_argument, "more folds than examples");
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  auto eng = rng::make_engine(seed);
  rng::shuffle(eng, order);
  std::vector<std::vector<int>> out(folds);
  for (int i = 0; i < n; ++i) out[i % folds].push_back(order[i]);
  return out;
}

CvResult cross_validate_C(const Dataset& data, std::vector<double> grid, int folds,
                          std::uint64_t seed, const TrainConfig& base) {
  require(!grid.empty(), ErrorKind::invalid_argument, "C grid must be nonempty");
  for (double c : grid)
    require(c > 0.0 && std::isfinite(c), ErrorKind::invalid_argument, "grid entries must be positive");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  data.validate_for_fit();

  const int n = data.size();
  DesignMatrix dm = to_design(data);
  auto fold_sets = kfold_indices(n, folds, seed);

  CvResult result;
  result.grid = grid;
  result.mean_accuracy.assign(grid.size(), 0.0);

  // A fold is usable when its training part still contains both classes;
  // usability is independent of C, so means stay comparable across the grid.
  std::vector<char> usable(fold_sets.size(), 1);
  int n_usable = 0;
  for (std::size_t f = 0; f < fold_sets.size(); ++f) {
    double w_pos = 0.0, w_neg = 0.0;
    std::vector<char> in_fold(n, 0);
    for (int i : fold_sets[f]) in_fold[i] = 1;
    for (int i = 0; i < n; ++i)
      if (!in_fold[i]) (dm.y[i] > 0 ? w_pos : w_neg) += dm.w[i];
    if (w_pos <= 0.0 || w_neg <= 0.0) {
      usable[f] = 0;
      result.warnings.push_back("fold " + std::to_string(f) +
                                " skipped: training part is single-class");
    } else {
      ++n_usable;
    }
  }
  require(n_usable > 0, ErrorKind::data, "all cross-validation folds were skipped");

  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    TrainConfig cfg = base;
    cfg.C = grid[ci];
    double acc_sum = 0.0;
    for (std::size_t f = 0; f < fold_sets.size(); ++f) {
      if (!usable[f]) continue;
      std::vector<char> in_fold(n, 0);
      for (int i : fold_sets[f]) in_fold[i] = 1;
      const int n_val = static_cast<int>(fold_sets[f].size());
      const int n_train = n - n_val;
      Eigen::MatrixXd Xtr(n_train, data.feature_dim), Xva(n_val, data.feature_dim);
      Eigen::VectorXd ytr(n_train), wtr(n_train), yva(n_val);
      int a = 0, b = 0;
      for (int i = 0; i < n; ++i) {
        if (in_fold[i]) {
          Xva.row(b) = dm.X.row(i);
          yva[b++] = dm.y[i];
        } else {
          Xtr.row(a) = dm.X.row(i);
          ytr[a] = dm.y[i];
          wtr[a++] = dm.w[i];
        }
      }
      ModelParams params = fit_logistic(Xtr, ytr, wtr, cfg);
      acc_sum += accuracy(params, Xva, yva);
    }
    result.mean_accuracy[ci] = acc_sum / n_usable;
  }

  std::size_t best = 0;
  for (std::size_t ci = 1; ci < grid.size(); ++ci)
    if (result.mean_accuracy[ci] > result.mean_accuracy[best]) best = ci;  // ties keep smaller C
  result.best_C = grid[best];
  return result;
}

}  // namespace augsel
