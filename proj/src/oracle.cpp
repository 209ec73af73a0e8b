#include "augsel/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "augsel/dpp.hpp"
#include "augsel/influence.hpp"
#include "augsel/select.hpp"
#include "augsel/stats.hpp"
#include "augsel/textio.hpp"

namespace augsel::oracle {

namespace {

std::string fmt(double v) { return format_double(v); }

Eigen::MatrixXd random_matrix(rng::Engine& eng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng::normal(eng);
  return m;
}

}  // namespace

Dataset clustered_fixture(int anchors, int replicas, int dim, double separation, double jitter,
                          std::uint64_t seed) {
  Dataset data;
  data.feature_dim = dim;
  auto eng = rng::make_engine(seed);
  for (int a = 0; a < anchors; ++a) {
    const int label = a % 2 == 0 ? 1 : -1;
    Eigen::VectorXd mu(dim);
    for (int j = 0; j < dim; ++j) mu[j] = label * separation / 2.0 + rng::normal(eng);
    for (int r = 0; r < replicas; ++r) {
      LabeledExample ex;
      ex.features = mu;
      for (int j = 0; j < dim; ++j) ex.features[j] += jitter * rng::normal(eng);
      ex.label = label;
      ex.origin_id = data.size();
      data.push_back(std::move(ex));
    }
  }
  return data;
}

Check check_loo_fixture(const std::string& name, const Dataset& data, const TrainConfig& config,
                        double min_abs_rho, double max_top_rel_err, int top_k) {
  Check check;
  check.name = "loo/" + name;
  const int n = data.size();

  ModelParams params = fit_logistic(data, config);
  HessianFactor factor = HessianFactor::factorize(hessian(params, data, config));
  std::vector<double> influences(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    influences[static_cast<std::size_t>(i)] =
        loo_influence(params, factor, data.examples[static_cast<std::size_t>(i)]);
  std::vector<double> deltas = brute_force_loo_all(data, config);

  double max_pos = 0.0, max_abs = 0.0;
  for (double v : influences) {
    max_pos = std::max(max_pos, v);
    max_abs = std::max(max_abs, std::abs(v));
  }
  const bool signs_ok = max_pos <= 1e-12 * std::max(max_abs, 1e-300);

  SpearmanResult corr = spearman(influences, deltas);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(influences[static_cast<std::size_t>(a)]) >
           std::abs(influences[static_cast<std::size_t>(b)]);
  });
  double worst_rel = 0.0;
  for (int t = 0; t < std::min(top_k, n); ++t) {
    const int i = order[static_cast<std::size_t>(t)];
    const double est = -influences[static_cast<std::size_t>(i)];
    const double truth = deltas[static_cast<std::size_t>(i)];
    const double rel = std::abs(est - truth) / std::max(std::abs(truth), 1e-300);
    worst_rel = std::max(worst_rel, rel);
  }

  check.passed = signs_ok && corr.rho <= -min_abs_rho && worst_rel <= max_top_rel_err;
  std::ostringstream detail;
  detail << "n=" << n << " rho=" << fmt(corr.rho) << " (need <= " << fmt(-min_abs_rho) << ")"
         << " top" << top_k << " rel err=" << fmt(worst_rel) << " (need <= "
         << fmt(max_top_rel_err) << ")" << (signs_ok ? "" : " SIGN VIOLATION");
  check.detail = detail.str();
  return check;
}

Check check_gradient_fd(int trials, std::uint64_t seed, double rel_tol) {
  Check check;
  check.name = "calculus/point_gradient_vs_fd";
  auto eng = rng::make_engine(seed);
  const double h = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int d = 2 + static_cast<int>(rng::below(eng, 6));
    ModelParams params;
    params.weights = random_matrix(eng, d, 1);
    params.bias = rng::normal(eng);
    LabeledExample z;
    z.features = random_matrix(eng, d, 1);
    z.label = rng::uniform01(eng) < 0.5 ? 1 : -1;
    Eigen::VectorXd g = point_gradient(params, z);
    for (int j = 0; j <= d; ++j) {
      ModelParams up = params, dn = params;
      if (j < d) {
        up.weights[j] += h;
        dn.weights[j] -= h;
      } else {
        up.bias += h;
        dn.bias -= h;
      }
      const double fd = (point_loss(up, z) - point_loss(dn, z)) / (2.0 * h);
      const double rel = std::abs(fd - g[j]) / std::max(std::abs(g[j]), 1e-8);
      worst = std::max(worst, rel);
    }
  }
  check.passed = worst < rel_tol;
  check.detail = "worst rel err=" + fmt(worst) + " over " + std::to_string(trials) +
                 " random points (need < " + fmt(rel_tol) + ")";
  return check;
}

Check check_hessian_fd(int trials, std::uint64_t seed, double rel_tol) {
  Check check;
  check.name = "calculus/hessian_vs_fd";
  auto eng = rng::make_engine(seed);
  const double h = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int d = 2 + static_cast<int>(rng::below(eng, 4));
    const int n = 6 + static_cast<int>(rng::below(eng, 10));
    Eigen::MatrixXd X = random_matrix(eng, n, d);
    Eigen::VectorXd y(n), w(n);
    for (int i = 0; i < n; ++i) {
      y[i] = rng::uniform01(eng) < 0.5 ? 1.0 : -1.0;
      w[i] = 0.25 + rng::uniform01(eng);
    }
    const double C = 0.5 + 4.0 * rng::uniform01(eng);
    ModelParams params;
    params.weights = 0.5 * random_matrix(eng, d, 1);
    params.bias = 0.5 * rng::normal(eng);
    Eigen::MatrixXd H = hessian(params, X, w, C);
    const double scale = H.cwiseAbs().maxCoeff();
    for (int j = 0; j <= d; ++j) {
      ModelParams up = params, dn = params;
      if (j < d) {
        up.weights[j] += h;
        dn.weights[j] -= h;
      } else {
        up.bias += h;
        dn.bias -= h;
      }
      Eigen::VectorXd col =
          (objective_gradient(up, X, y, w, C) - objective_gradient(dn, X, y, w, C)) / (2.0 * h);
      for (int i = 0; i <= d; ++i) {
        const double rel = std::abs(col[i] - H(i, j)) / std::max(scale, 1e-8);
        worst = std::max(worst, rel);
      }
    }
  }
  check.passed = worst < rel_tol;
  check.detail = "worst rel err=" + fmt(worst) + " over " + std::to_string(trials) +
                 " random fixtures (need < " + fmt(rel_tol) + ")";
  return check;
}

Check check_solver_gd(const std::string& name, const Dataset& data, const TrainConfig& config,
                      long steps, double tol) {
  Check check;
  check.name = "solver/" + name;
  ModelParams newton = fit_logistic(data, config);
  DesignMatrix dm = to_design(data);
  const Eigen::Index d = dm.X.cols();

  // conservative Lipschitz bound for the gradient: C/4 * sum w ||a||^2 + 1
  double lip = 1.0;
  for (Eigen::Index i = 0; i < dm.X.rows(); ++i)
    lip += config.C * dm.w[i] * (dm.X.row(i).squaredNorm() + 1.0) / 4.0;
  const double step = 1.0 / lip;

  ModelParams gd;
  gd.weights = Eigen::VectorXd::Zero(d);
  gd.bias = 0.0;
  for (long s = 0; s < steps; ++s) {
    Eigen::VectorXd g = objective_gradient(gd, dm.X, dm.y, dm.w, config.C);
    if (g.lpNorm<Eigen::Infinity>() < 1e-14) break;
    gd.weights -= step * g.head(d);
    gd.bias -= step * g[d];
  }
  double diff = (newton.weights - gd.weights).lpNorm<Eigen::Infinity>();
  diff = std::max(diff, std::abs(newton.bias - gd.bias));
  const double grad_norm =
      objective_gradient(newton, dm.X, dm.y, dm.w, config.C).lpNorm<Eigen::Infinity>();
  check.passed = diff <= tol && grad_norm <= config.tol;
  check.detail = "inf-norm gap=" + fmt(diff) + " (need <= " + fmt(tol) +
                 "), fitted grad norm=" + fmt(grad_norm);
  return check;
}

Check check_esym_enumeration(int n, int k, std::uint64_t seed) {
  Check check;
  check.name = "dpp/elementary_symmetric_vs_enumeration";
  auto eng = rng::make_engine(seed);
  Eigen::VectorXd lambda(n);
  for (int i = 0; i < n; ++i) lambda[i] = 3.0 * rng::uniform01(eng);
  ElementarySymmetric esym(lambda, k);

  // brute force over all subsets of size <= k
  double worst = 0.0;
  for (int kk = 0; kk <= k; ++kk) {
    double total = 0.0;
    std::vector<int> pick(static_cast<std::size_t>(kk));
    // enumerate kk-subsets of [0, n)
    std::function<void(int, int, double)> rec = [&](int start, int left, double prod) {
      if (left == 0) {
        total += prod;
        return;
      }
      for (int i = start; i <= n - left; ++i) rec(i + 1, left - 1, prod * lambda[i]);
    };
    rec(0, kk, 1.0);
    const double got = esym.value(kk, n);
    const double rel = std::abs(got - total) / std::max(std::abs(total), 1e-300);
    worst = std::max(worst, rel);
  }
  check.passed = worst < 1e-12;
  check.detail = "n=" + std::to_string(n) + " k<=" + std::to_string(k) +
                 " worst rel err=" + fmt(worst) + " (need < 1e-12)";
  return check;
}

Check check_kdpp_frequencies(int n, int k, int trials, double tol, std::uint64_t seed) {
  Check check;
  check.name = "dpp/kdpp_vs_determinant_enumeration";
  auto eng = rng::make_engine(seed);

  // random PSD kernel via a random factor (keep entries modest)
  Eigen::MatrixXd B = random_matrix(eng, n, n);
  ScoreVector q;
  q.values.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) q.values[static_cast<std::size_t>(i)] = 0.2 + rng::uniform01(eng);
  DppKernel kernel = build_dpp_kernel(B, q);
  // rescale L to tame the 1000x feature scaling for the enumeration side
  // (scaling L scales every det(L_S) with |S|=k by the same factor)

  // enumerate all subsets of size k and their principal minors
  std::vector<std::vector<int>> subsets;
  std::vector<double> dets;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      Eigen::MatrixXd sub(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sub(a, b) = kernel.L(cur[static_cast<std::size_t>(a)],
                                                         cur[static_cast<std::size_t>(b)]);
      subsets.push_back(cur);
      dets.push_back(std::max(0.0, sub.determinant()));
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  double det_total = 0.0;
  for (double d : dets) det_total += d;

  std::map<std::vector<int>, long> counts;
  auto sample_eng = rng::make_engine(rng::derive(seed, {7}));
  for (int t = 0; t < trials; ++t) counts[sample_kdpp(kernel, k, sample_eng)]++;

  double worst = 0.0;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    const double expected = dets[s] / det_total;
    const double observed =
        static_cast<double>(counts[subsets[s]]) / static_cast<double>(trials);
    worst = std::max(worst, std::abs(observed - expected));
  }
  check.passed = worst < tol;
  check.detail = "n=" + std::to_string(n) + " k=" + std::to_string(k) + " subsets=" +
                 std::to_string(subsets.size()) + " worst |obs-exp|=" + fmt(worst) +
                 " over " + std::to_string(trials) + " samples (need < " + fmt(tol) + ")";
  return check;
}

Check check_uniform_chisquare(int n, int k, int trials, std::uint64_t seed) {
  Check check;
  check.name = "sampler/uniform_chisquare";
  // all k-subsets of [0, n) as categories
  std::map<std::vector<int>, long> counts;
  std::vector<std::vector<int>> cats;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      cats.push_back(cur);
      counts[cur] = 0;
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);

  auto eng = rng::make_engine(seed);
  for (int t = 0; t < trials; ++t) {
    auto s = sample_uniform(n, k, eng);
    std::sort(s.begin(), s.end());
    counts[s]++;
  }
  const double expected = static_cast<double>(trials) / static_cast<double>(cats.size());
  double chi2 = 0.0;
  for (const auto& c : cats) {
    const double diff = static_cast<double>(counts[c]) - expected;
    chi2 += diff * diff / expected;
  }
  // critical values of chi-square at p = 0.001 by degrees of freedom
  static const std::map<int, double> kCritical = {
      {9, 27.877}, {14, 36.123}, {19, 43.820}, {44, 78.750}, {55, 93.168}};
  const int dof = static_cast<int>(cats.size()) - 1;
  auto it = kCritical.find(dof);
  require(it != kCritical.end(), ErrorKind::invalid_argument,
          "no critical value tabulated for dof " + std::to_string(dof));
  check.passed = chi2 < it->second;
  check.detail = "chi2=" + fmt(chi2) + " dof=" + std::to_string(dof) + " critical(p=0.001)=" +
                 fmt(it->second);
  return check;
}

Check check_proportional_exact(const std::vector<double>& scores, int k, int trials, double tol,
                               std::uint64_t seed) {
  Check check;
  check.name = "sampler/proportional_vs_enumeration";
  const int n = static_cast<int>(scores.size());
  ScoreVector sv;
  sv.values = scores;

  // exact probability of each ordered k-tuple under sequential renormalized draws
  std::map<std::vector<int>, double> expected;
  std::vector<int> cur;
  std::function<void(double)> rec = [&](double prob) {
    if (static_cast<int>(cur.size()) == k) {
      expected[cur] = prob;
      return;
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      if (std::find(cur.begin(), cur.end(), i) == cur.end()) total += scores[static_cast<std::size_t>(i)];
    for (int i = 0; i < n; ++i) {
      if (std::find(cur.begin(), cur.end(), i) != cur.end()) continue;
      double p = total > 0.0 ? scores[static_cast<std::size_t>(i)] / total
                             : 1.0 / static_cast<double>(n - cur.size());
      if (p <= 0.0) continue;
      cur.push_back(i);
      rec(prob * p);
      cur.pop_back();
    }
  };
  rec(1.0);

  std::map<std::vector<int>, long> counts;
  auto eng = rng::make_engine(seed);
  for (int t = 0; t < trials; ++t) counts[sample_proportional(sv, k, eng)]++;

  double worst = 0.0;
  for (const auto& [tuple, prob] : expected) {
    const double observed = static_cast<double>(counts[tuple]) / static_cast<double>(trials);
    worst = std::max(worst, std::abs(observed - prob));
  }
  check.passed = worst < tol;
  check.detail = "worst |obs-exp|=" + fmt(worst) + " over " + std::to_string(trials) +
                 " trials (need < " + fmt(tol) + ")";
  return check;
}

std::vector<std::string> suite_names() { return {"loo", "calculus", "solver", "dpp", "sampler"}; }

std::vector<Check> run_suite(const std::string& suite) {
  std::vector<Check> checks;
  const bool all = suite.empty() || suite == "all";
  bool known = all;

  if (all || suite == "loo") {
    known = true;
    TrainConfig cfg;
    cfg.C = 1.0;
    cfg.tol = 1e-10;
    checks.push_back(check_loo_fixture("clustered_50x2d",
                                       clustered_fixture(5, 10, 2, 1.4, 0.12, 31), cfg, 0.99,
                                       0.15, 10));
    checks.push_back(check_loo_fixture("clustered_48x3d",
                                       clustered_fixture(4, 12, 3, 1.6, 0.12, 11), cfg, 0.99,
                                       0.15, 10));
  }
  if (all || suite == "calculus") {
    known = true;
    checks.push_back(check_gradient_fd(100, 2024011, 1e-6));
    checks.push_back(check_hessian_fd(25, 2024012, 1e-5));
  }
  if (all || suite == "solver") {
    known = true;
    TrainConfig cfg;
    cfg.C = 10.0;
    checks.push_back(check_solver_gd("clustered_20x2d",
                                     clustered_fixture(5, 4, 2, 1.4, 0.3, 2024021), cfg, 1000000,
                                     1e-6));
  }
  if (all || suite == "dpp") {
    known = true;
    checks.push_back(check_esym_enumeration(10, 4, 2024031));
    checks.push_back(check_kdpp_frequencies(8, 3, 200000, 0.01, 2024032));
  }
  if (all || suite == "sampler") {
    known = true;
    checks.push_back(check_uniform_chisquare(5, 2, 100000, 2024041));
    checks.push_back(check_proportional_exact({2.0, 1.0, 1.0}, 2, 200000, 0.005, 2024042));
  }
  require(known, ErrorKind::invalid_argument, "unknown oracle suite: " + suite);
  return checks;
}

}  // namespace augsel::oracle
