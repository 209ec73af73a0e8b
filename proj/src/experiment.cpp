#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "augsel/dpp.hpp"
#include "augsel/experiment.hpp"
#include "augsel/idx.hpp"
#include "augsel/influence.hpp"
#include "augsel/kmeans.hpp"
#include "augsel/select.hpp"
#include "augsel/svm.hpp"

namespace augsel {

namespace {

// purpose tags for derived seed streams
enum : std::uint64_t {
  kSeedSelect = 1,
  kSeedCluster = 2,
  kSeedDpp = 3,
  kSeedSvm = 4,
  kSeedCvInitial = 5,
  kSeedCvRound = 6,
  kSeedTestSubset = 7,
};

struct LoadedData {
  Eigen::MatrixXd X0;
  Eigen::VectorXd y0, w0;
  int n = 0, d = 0, m = 0;
  Eigen::MatrixXd member_rows;  // (n*m) x d; member j of origin i at row i*m+j
  Eigen::MatrixXd Xt;
  Eigen::VectorXd yt;
  int split_pos = 0, split_neg = 0;

  Dataset base_dataset() const {
    Dataset ds;
    ds.feature_dim = d;
    for (int i = 0; i < n; ++i) {
      LabeledExample ex;
      ex.features = X0.row(i);
      ex.label = static_cast<int>(y0[i]);
      ex.weight = w0[i];
      ex.origin_id = i;
      ds.push_back(std::move(ex));
    }
    return ds;
  }
};

LoadedData load_from_idx(const ExperimentConfig& cfg, const IdxSource& src) {
  LoadedData data;
  auto train_pairs = load_idx(src.train_images, src.train_labels);
  BinaryTask train = make_binary_task(train_pairs, src.class_a, src.class_b, src.n_train,
                                      src.sample_seed);
  data.split_pos = train.n_positive;
  data.split_neg = train.n_negative;
  DesignMatrix dm = to_design(train.data);
  data.X0 = std::move(dm.X);
  data.y0 = std::move(dm.y);
  data.w0 = std::move(dm.w);
  data.n = static_cast<int>(data.X0.rows());
  data.d = static_cast<int>(data.X0.cols());

  const TransformSpec& spec = *cfg.transform;
  data.m = spec.grid_size();
  data.member_rows.resize(static_cast<Eigen::Index>(data.n) * data.m, data.d);
  for (int i = 0; i < data.n; ++i) {
    AugmentationFamily fam = expand(spec, train.data.examples[static_cast<std::size_t>(i)],
                                    train.images[static_cast<std::size_t>(i)]);
    require(static_cast<int>(fam.members.size()) == data.m, ErrorKind::data,
            "augmentation grid size changed between examples");
    for (int j = 0; j < data.m; ++j)
      data.member_rows.row(static_cast<Eigen::Index>(i) * data.m + j) =
          fam.members[static_cast<std::size_t>(j)].features;
  }

  auto test_pairs = load_idx(src.test_images, src.test_labels);
  BinaryTask test;
  if (src.n_test > 0)
    test = make_binary_task(test_pairs, src.class_a, src.class_b, src.n_test,
                            rng::derive(src.sample_seed, {kSeedTestSubset}));
  else
    test = filter_binary(test_pairs, src.class_a, src.class_b);
  std::vector<int> labels;
  labels.reserve(test.data.examples.size());
  for (const auto& ex : test.data.examples) labels.push_back(ex.label);
  Dataset poisoned = build_poisoned_test(test.images, labels, spec);
  DesignMatrix pm = to_design(poisoned);
  data.Xt = std::move(pm.X);
  data.yt = std::move(pm.y);
  return data;
}

LoadedData load_from_csv(const CsvSource& src) {
  LoadedData data;
  Dataset train = load_feature_csv(src.train);
  train.validate_for_fit();
  DesignMatrix dm = to_design(train);
  data.X0 = std::move(dm.X);
  data.y0 = std::move(dm.y);
  data.w0 = std::move(dm.w);
  data.n = static_cast<int>(data.X0.rows());
  data.d = static_cast<int>(data.X0.cols());
  for (int i = 0; i < data.n; ++i) (data.y0[i] > 0 ? data.split_pos : data.split_neg)++;

  MemberTable members = load_member_csv(src.train_members, data.d, data.n);
  data.m = members.member_count;
  data.member_rows.resize(static_cast<Eigen::Index>(data.n) * data.m, data.d);
  for (int i = 0; i < data.n; ++i) {
    const auto& fam = members.family(i);
    for (int j = 0; j < data.m; ++j)
      data.member_rows.row(static_cast<Eigen::Index>(i) * data.m + j) =
          fam[static_cast<std::size_t>(j)];
  }

  Dataset test = load_feature_csv(src.test);
  MemberTable test_members = load_member_csv(src.test_members, data.d, test.size());
  const int nt = test.size();
  const int mt = test_members.member_count;
  data.Xt.resize(static_cast<Eigen::Index>(nt) * (1 + mt), data.d);
  data.yt.resize(static_cast<Eigen::Index>(nt) * (1 + mt));
  for (int i = 0; i < nt; ++i) {
    data.Xt.row(i) = test.examples[static_cast<std::size_t>(i)].features;
    data.yt[i] = test.examples[static_cast<std::size_t>(i)].label;
  }
  Eigen::Index row = nt;
  for (int i = 0; i < nt; ++i) {
    for (const auto& f : test_members.family(i)) {
      data.Xt.row(row) = f;
      data.yt[row] = test.examples[static_cast<std::size_t>(i)].label;
      ++row;
    }
  }
  return data;
}

struct InitialState {
  TrainConfig cfg0;
  ModelParams params0;
  double acc0 = 0.0;
  std::vector<double> infl0_abs;              // |I_LOO| per original point
  std::map<Metric, ScoreVector> scores0;      // base (non-inverted) scores
  std::optional<SvmFit> svm;
  std::map<std::size_t, DppKernel> kernels;   // keyed by policy index
};

std::vector<double> abs_influences(const ModelParams& params, const HessianFactor& factor,
                                   const LoadedData& data) {
  std::vector<double> out(static_cast<std::size_t>(data.n));
  for (int i = 0; i < data.n; ++i) {
    Eigen::VectorXd g = point_gradient(params, data.X0.row(i), static_cast<int>(data.y0[i]));
    out[static_cast<std::size_t>(i)] = std::abs(-g.dot(factor.solve(g)));
  }
  return out;
}

InitialState build_initial_state(const ExperimentConfig& cfg, const LoadedData& data) {
  InitialState init;
  init.cfg0 = cfg.train.config;
  Dataset base;  // built lazily; several consumers below
  bool base_built = false;
  auto ensure_base = [&]() {
    if (!base_built) {
      base = data.base_dataset();
      base_built = true;
    }
  };

  if (cfg.train.use_cv) {
    ensure_base();
    CvResult cv = cross_validate_C(base, cfg.train.cv_grid, cfg.train.cv_folds,
                                   rng::derive(cfg.base_seed, {kSeedCvInitial}), cfg.train.config);
    init.cfg0.C = cv.best_C;
  }
  init.params0 = fit_logistic(data.X0, data.y0, data.w0, init.cfg0);
  init.acc0 = accuracy(init.params0, data.Xt, data.yt);

  HessianFactor factor0 =
      HessianFactor::factorize(hessian(init.params0, data.X0, data.w0, init.cfg0.C));
  init.infl0_abs = abs_influences(init.params0, factor0, data);

  bool need_svm = false;
  for (const auto& p : cfg.policies)
    if (p.kind == PolicyConfig::Kind::vsv || p.metric == Metric::margin_abs ||
        p.metric == Metric::margin_inv)
      need_svm = true;
  if (need_svm) {
    ensure_base();
    init.svm = fit_svm(base, {0.01, 0.1, 1.0, 10.0, 100.0}, 5,
                       rng::derive(cfg.base_seed, {kSeedSvm}));
  }

  auto base_scores = [&](Metric metric) -> ScoreVector {
    ScoreVector s;
    s.metric = metric;
    s.model_version = 0;
    switch (metric) {
      case Metric::uniform:
        s.values.assign(static_cast<std::size_t>(data.n), 1.0);
        break;
      case Metric::loss:
        for (int i = 0; i < data.n; ++i)
          s.values.push_back(point_loss(init.params0, data.X0.row(i), static_cast<int>(data.y0[i])));
        break;
      case Metric::influence:
        s.values = init.infl0_abs;
        break;
      case Metric::margin_abs:
      case Metric::margin_inv: {
        ensure_base();
        s = margin_scores(*init.svm, base,
                          metric == Metric::margin_abs ? MarginVariant::absolute
                                                       : MarginVariant::inverse);
        break;
      }
    }
    return s;
  };

  for (const auto& p : cfg.policies)
    if (p.kind != PolicyConfig::Kind::baseline_uniform && p.kind != PolicyConfig::Kind::vsv)
      if (init.scores0.find(p.metric) == init.scores0.end())
        init.scores0.emplace(p.metric, base_scores(p.metric));

  for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
    const auto& p = cfg.policies[pi];
    if (p.kind != PolicyConfig::Kind::kdpp) continue;
    ScoreVector quality = init.scores0.at(p.metric);
    if (p.inverse) quality = invert_scores(quality);
    init.kernels.emplace(pi, build_dpp_kernel(data.X0, quality));
  }
  return init;
}

int resolve_budget(const ExperimentConfig& cfg, const InitialState& init,
                   const PolicyConfig& policy) {
  if (policy.kind == PolicyConfig::Kind::vsv)
    return static_cast<int>(init.svm->support_indices.size());
  return cfg.budget;
}

std::vector<int> checkpoints_for(const ExperimentConfig& cfg, int realized_budget) {
  std::vector<int> base =
      cfg.checkpoints.empty() ? default_checkpoints(cfg.budget) : cfg.checkpoints;
  std::vector<int> out;
  for (int c : base)
    if (c <= realized_budget) out.push_back(c);
  if (out.empty() || out.front() != 0) out.insert(out.begin(), 0);
  if (out.back() != realized_budget) out.push_back(realized_budget);
  return out;
}

// selection of the next not-yet-augmented source point
struct PolicyState {
  std::vector<char> augmented;
  ScoreVector scores;            // current, inverse already applied
  std::vector<int> plan;         // vsv / kdpp reveal order, stratified cluster order
  std::size_t plan_pos = 0;
  std::vector<int> assignments;  // stratified
};

int pick_next(const PolicyConfig& policy, PolicyState& st, rng::Engine& eng, int n) {
  switch (policy.kind) {
    case PolicyConfig::Kind::baseline_uniform: {
      int remaining = 0;
      for (int i = 0; i < n; ++i) remaining += !st.augmented[static_cast<std::size_t>(i)];
      std::size_t rank = rng::below(eng, static_cast<std::size_t>(remaining));
      for (int i = 0; i < n; ++i) {
        if (st.augmented[static_cast<std::size_t>(i)]) continue;
        if (rank == 0) return i;
        --rank;
      }
      break;
    }
    case PolicyConfig::Kind::random_proportional: {
      double total = 0.0;
      for (int i = 0; i < n; ++i)
        if (!st.augmented[static_cast<std::size_t>(i)]) total += st.scores.values[static_cast<std::size_t>(i)];
      if (total > 0.0) {
        double u = rng::uniform01(eng) * total;
        double cum = 0.0;
        int last = -1;
        for (int i = 0; i < n; ++i) {
          if (st.augmented[static_cast<std::size_t>(i)]) continue;
          last = i;
          cum += st.scores.values[static_cast<std::size_t>(i)];
          if (u < cum) return i;
        }
        return last;  // rounding guard
      }
      // zero mass left: uniform over the remaining (all zero-score) points
      int remaining = 0;
      for (int i = 0; i < n; ++i) remaining += !st.augmented[static_cast<std::size_t>(i)];
      std::size_t rank = rng::below(eng, static_cast<std::size_t>(remaining));
      for (int i = 0; i < n; ++i) {
        if (st.augmented[static_cast<std::size_t>(i)]) continue;
        if (rank == 0) return i;
        --rank;
      }
      break;
    }
    case PolicyConfig::Kind::deterministic_topk: {
      int best = -1;
      double best_score = -1.0;
      for (int i = 0; i < n; ++i) {
        if (st.augmented[static_cast<std::size_t>(i)]) continue;
        double s = st.scores.values[static_cast<std::size_t>(i)];
        if (s > best_score) {
          best_score = s;
          best = i;
        }
      }
      return best;
    }
    case PolicyConfig::Kind::vsv:
    case PolicyConfig::Kind::kdpp:
      return st.plan[st.plan_pos++];
    case PolicyConfig::Kind::stratified_cluster: {
      const int cluster = st.plan[st.plan_pos++];
      double total = 0.0;
      std::vector<int> members;
      for (int i = 0; i < n; ++i) {
        if (st.assignments[static_cast<std::size_t>(i)] != cluster) continue;
        members.push_back(i);
        if (policy.metric != Metric::uniform)
          total += st.scores.values[static_cast<std::size_t>(i)];
      }
      require(!members.empty(), ErrorKind::data, "empty cluster in stratified selection");
      if (policy.metric == Metric::uniform || total <= 0.0)
        return members[rng::below(eng, members.size())];
      double u = rng::uniform01(eng) * total;
      double cum = 0.0;
      for (int i : members) {
        cum += st.scores.values[static_cast<std::size_t>(i)];
        if (u < cum) return i;
      }
      return members.back();
    }
  }
  raise(ErrorKind::data, "policy failed to select a point");
}

TrainConfig resolve_round_config(const ExperimentConfig& cfg, const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& y, const Eigen::VectorXd& w, int n_cur,
                                 std::uint64_t cv_seed) {
  TrainConfig out = cfg.train.config;
  if (!cfg.train.use_cv) return out;
  Dataset ds;
  ds.feature_dim = static_cast<int>(X.cols());
  for (int i = 0; i < n_cur; ++i) {
    LabeledExample ex;
    ex.features = X.row(i);
    ex.label = static_cast<int>(y[i]);
    ex.weight = w[i];
    ex.origin_id = i;
    ds.push_back(std::move(ex));
  }
  CvResult cv = cross_validate_C(ds, cfg.train.cv_grid, cfg.train.cv_folds, cv_seed,
                                 cfg.train.config);
  out.C = cv.best_C;
  return out;
}

RepeatResult run_one(const ExperimentConfig& cfg, const LoadedData& data,
                     const InitialState& init, std::size_t p_idx, int r_idx, int realized_budget,
                     const std::vector<int>& checkpoints,
                     std::vector<std::pair<double, double>>* influence_pairs) {
  const PolicyConfig& policy = cfg.policies[p_idx];
  RepeatResult result;
  result.seed = rng::derive(cfg.base_seed, {kSeedSelect, p_idx, static_cast<std::uint64_t>(r_idx)});
  auto eng = rng::make_engine(result.seed);

  PolicyState st;
  st.augmented.assign(static_cast<std::size_t>(data.n), 0);
  if (policy.kind != PolicyConfig::Kind::baseline_uniform &&
      policy.kind != PolicyConfig::Kind::vsv) {
    st.scores = init.scores0.at(policy.metric);
    if (policy.inverse) st.scores = invert_scores(st.scores);
  }

  switch (policy.kind) {
    case PolicyConfig::Kind::vsv:
      st.plan = vsv_select(*init.svm);
      break;
    case PolicyConfig::Kind::kdpp: {
      auto dpp_eng = rng::make_engine(rng::derive(
          cfg.base_seed, {kSeedDpp, p_idx, static_cast<std::uint64_t>(r_idx)}));
      st.plan = sample_kdpp(init.kernels.at(p_idx), realized_budget, dpp_eng);
      rng::shuffle(dpp_eng, st.plan);  // reveal the set in random order
      break;
    }
    case PolicyConfig::Kind::stratified_cluster: {
      require(realized_budget >= 1, ErrorKind::config,
              "stratified clustering needs a positive budget");
      KmeansResult km = kmeans(data.X0, realized_budget,
                               rng::derive(cfg.base_seed,
                                           {kSeedCluster, p_idx, static_cast<std::uint64_t>(r_idx)}));
      st.assignments = std::move(km.assignments);
      st.plan.resize(static_cast<std::size_t>(realized_budget));
      for (int c = 0; c < realized_budget; ++c) st.plan[static_cast<std::size_t>(c)] = c;
      rng::shuffle(eng, st.plan);
      break;
    }
    default:
      break;
  }

  const int cap = data.n + realized_budget * data.m;
  Eigen::MatrixXd X(cap, data.d);
  Eigen::VectorXd y(cap), w(cap);
  X.topRows(data.n) = data.X0;
  y.head(data.n) = data.y0;
  w.head(data.n) = data.w0;
  int n_cur = data.n;

  result.curve.emplace_back(0.0, init.acc0);
  result.checkpoint_total_weight.push_back(w.head(n_cur).sum());
  if (realized_budget == 0) {
    if (influence_pairs)
      for (double v : init.infl0_abs) influence_pairs->emplace_back(v, v);
    return result;
  }

  std::size_t next_cp = 1;  // checkpoints[0] == 0 is already recorded
  int model_version = 0;
  for (int round = 1; round <= realized_budget; ++round) {
    const int pick = pick_next(policy, st, eng, data.n);
    st.augmented[static_cast<std::size_t>(pick)] = 1;

    double member_weight = w[pick];
    if (policy.downweight) {
      const double share =
          w[pick] / static_cast<double>(cfg.downweight_literal ? data.m : data.m + 1);
      w[pick] = share;
      member_weight = share;
    }
    X.middleRows(n_cur, data.m) =
        data.member_rows.middleRows(static_cast<Eigen::Index>(pick) * data.m, data.m);
    y.segment(n_cur, data.m).setConstant(data.y0[pick]);
    w.segment(n_cur, data.m).setConstant(member_weight);
    n_cur += data.m;

    if (next_cp < checkpoints.size() && round == checkpoints[next_cp]) {
      ++next_cp;
      try {
        TrainConfig round_cfg = resolve_round_config(
            cfg, X, y, w, n_cur,
            rng::derive(cfg.base_seed, {kSeedCvRound, p_idx, static_cast<std::uint64_t>(r_idx),
                                        static_cast<std::uint64_t>(round)}));
        ModelParams params = fit_logistic(X.topRows(n_cur), y.head(n_cur), w.head(n_cur), round_cfg);
        result.curve.emplace_back(round, accuracy(params, data.Xt, data.yt));
        result.checkpoint_total_weight.push_back(w.head(n_cur).sum());
        ++model_version;

        const bool is_final = round == realized_budget;
        if (policy.update_scores && !is_final) {
          ScoreVector fresh;
          fresh.metric = policy.metric;
          fresh.model_version = model_version;
          fresh.values.resize(static_cast<std::size_t>(data.n));
          if (policy.metric == Metric::loss) {
            for (int i = 0; i < data.n; ++i)
              fresh.values[static_cast<std::size_t>(i)] =
                  point_loss(params, data.X0.row(i), static_cast<int>(data.y0[i]));
          } else {
            HessianFactor factor = HessianFactor::factorize(
                hessian(params, X.topRows(n_cur), w.head(n_cur), round_cfg.C));
            for (int i = 0; i < data.n; ++i) {
              Eigen::VectorXd g =
                  point_gradient(params, data.X0.row(i), static_cast<int>(data.y0[i]));
              fresh.values[static_cast<std::size_t>(i)] = std::abs(-g.dot(factor.solve(g)));
            }
          }
          if (policy.inverse) fresh = invert_scores(fresh);
          st.scores = std::move(fresh);
        }
        if (influence_pairs && is_final) {
          HessianFactor factor = HessianFactor::factorize(
              hessian(params, X.topRows(n_cur), w.head(n_cur), round_cfg.C));
          for (int i = 0; i < data.n; ++i) {
            Eigen::VectorXd g =
                point_gradient(params, data.X0.row(i), static_cast<int>(data.y0[i]));
            influence_pairs->emplace_back(init.infl0_abs[static_cast<std::size_t>(i)],
                                          std::abs(-g.dot(factor.solve(g))));
          }
        }
      } catch (const Error& e) {
        throw Error(e.kind(), "policy '" + policy.display_name() + "' repeat " +
                                  std::to_string(r_idx) + " round " + std::to_string(round) +
                                  ": " + e.what());
      }
    }
  }
  return result;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, int threads) {
  config.validate();
  require(threads >= 1, ErrorKind::invalid_argument, "threads must be at least 1");

  LoadedData data = std::holds_alternative<IdxSource>(config.source)
                        ? load_from_idx(config, std::get<IdxSource>(config.source))
                        : load_from_csv(std::get<CsvSource>(config.source));
  require(config.budget <= data.n, ErrorKind::size,
          "budget exceeds the number of source points (" + std::to_string(data.n) + ")");

  InitialState init = build_initial_state(config, data);

  ExperimentReport report;
  report.config_json = canonical_config_json(config);
  report.config_hash = config_hash_hex(config);
  report.n_train = data.n;
  report.feature_dim = data.d;
  report.member_count = data.m;
  report.n_test_rows = static_cast<int>(data.Xt.rows());
  report.split_positive = data.split_pos;
  report.split_negative = data.split_neg;
  report.unaugmented_accuracy = init.acc0;
  for (const auto& [metric, scores] : init.scores0)
    if (metric != Metric::uniform)
      report.initial_histograms.emplace_back(metric,
                                             score_histogram(scores.values, config.histogram_bins));

  struct Job {
    std::size_t policy;
    int repeat;
  };
  std::vector<Job> jobs;
  report.policies.resize(config.policies.size());
  for (std::size_t pi = 0; pi < config.policies.size(); ++pi) {
    auto& outcome = report.policies[pi];
    outcome.policy = config.policies[pi];
    outcome.realized_budget = resolve_budget(config, init, config.policies[pi]);
    const int n_repeats = config.policies[pi].is_deterministic() ? 1 : config.repeats;
    outcome.repeats.resize(static_cast<std::size_t>(n_repeats));
    for (int r = 0; r < n_repeats; ++r) jobs.push_back({pi, r});
  }

  std::atomic<std::size_t> next_job{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next_job.fetch_add(1);
      if (j >= jobs.size()) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        const Job& job = jobs[j];
        auto& outcome = report.policies[job.policy];
        std::vector<std::pair<double, double>>* pairs =
            job.repeat == 0 ? &outcome.influence_pairs : nullptr;
        outcome.repeats[static_cast<std::size_t>(job.repeat)] =
            run_one(config, data, init, job.policy, job.repeat, outcome.realized_budget,
                    checkpoints_for(config, outcome.realized_budget), pairs);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int n_workers = std::min<std::size_t>(threads, jobs.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (auto& outcome : report.policies) {
    std::vector<double> aucs;
    for (auto& rep : outcome.repeats) {
      rep.auc = rep.curve.size() >= 2 ? auc(rep.curve) : std::nan("");
      aucs.push_back(rep.auc);
    }
    double mean = 0.0;
    for (double a : aucs) mean += a;
    outcome.auc_mean = mean / static_cast<double>(aucs.size());
    if (aucs.size() >= 2) {
      double ss = 0.0;
      for (double a : aucs) ss += (a - outcome.auc_mean) * (a - outcome.auc_mean);
      outcome.auc_std = std::sqrt(ss / (static_cast<double>(aucs.size()) - 1.0));
    }
    if (!outcome.influence_pairs.empty()) {
      std::vector<double> before, after;
      for (const auto& [b, a] : outcome.influence_pairs) {
        before.push_back(b);
        after.push_back(a);
      }
      try {
        outcome.pair_correlation = spearman(before, after);
      } catch (const Error&) {
        outcome.pair_correlation = std::nullopt;  // constant vectors etc.
      }
    }
  }
  return report;
}

}  // namespace augsel
