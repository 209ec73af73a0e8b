// augsel command line: ingest, score, select, augment, run, report, oracle.
// Links only the public C API.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "augsel/augsel.h"

namespace {

int exit_code_for(aug_status status) {
  if (status == AUG_OK) return 0;
  return status == AUG_ERROR_NUMERIC ? 3 : 2;
}

int fail(aug_status status) {
  std::fprintf(stderr, "augsel: %s\n", aug_last_error());
  return exit_code_for(status);
}

aug_metric metric_from_flag(const std::string& name) {
  if (name == "loss") return AUG_METRIC_LOSS;
  if (name == "influence") return AUG_METRIC_INFLUENCE;
  if (name == "margin_abs") return AUG_METRIC_MARGIN_ABS;
  if (name == "margin_inv") return AUG_METRIC_MARGIN_INV;
  return AUG_METRIC_UNIFORM;
}

struct ScoresHandle {
  aug_scores* ptr = nullptr;
  ~ScoresHandle() { aug_scores_free(ptr); }
};
struct DatasetHandle {
  aug_dataset* ptr = nullptr;
  ~DatasetHandle() { aug_dataset_free(ptr); }
};
struct ModelHandle {
  aug_model* ptr = nullptr;
  ~ModelHandle() { aug_model_free(ptr); }
};
struct IndicesHandle {
  aug_indices* ptr = nullptr;
  ~IndicesHandle() { aug_indices_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"augmentation subset selection experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(aug_version()));

  // ingest
  auto* ingest = app.add_subcommand("ingest", "carve a binary task out of IDX files into a feature CSV");
  std::string in_images, in_labels, in_out;
  int in_a = 3, in_b = 8, in_ntrain = 1000;
  std::uint64_t in_seed = 0;
  ingest->add_option("--images", in_images, "IDX image file")->required();
  ingest->add_option("--labels", in_labels, "IDX label file")->required();
  ingest->add_option("--class-a", in_a, "label mapped to +1");
  ingest->add_option("--class-b", in_b, "label mapped to -1");
  ingest->add_option("--n-train", in_ntrain, "sample size (-1 = all examples of the two classes)");
  ingest->add_option("--seed", in_seed, "sampling seed");
  ingest->add_option("--out", in_out, "output feature CSV")->required();

  // score
  auto* score = app.add_subcommand("score", "fit (or load) a model and write per-point scores");
  std::string sc_data, sc_metric = "loss", sc_model_in, sc_model_out, sc_out;
  double sc_C = 10.0, sc_tol = 1e-8;
  int sc_maxit = 100, sc_folds = 5;
  std::vector<double> sc_grid;
  std::uint64_t sc_seed = 0;
  score->add_option("--data", sc_data, "feature CSV")->required();
  score->add_option("--metric", sc_metric, "loss|influence|margin_abs|margin_inv")
      ->check(CLI::IsMember({"loss", "influence", "margin_abs", "margin_inv"}));
  score->add_option("--C", sc_C, "inverse regularization strength");
  score->add_option("--tol", sc_tol, "gradient norm tolerance");
  score->add_option("--max-iter", sc_maxit, "Newton iteration cap");
  score->add_option("--model", sc_model_in, "load fitted parameters instead of fitting");
  score->add_option("--save-model", sc_model_out, "save the fitted parameters");
  score->add_option("--svm-grid", sc_grid, "SVM C grid for the margin metrics");
  score->add_option("--svm-folds", sc_folds, "SVM cross-validation folds");
  score->add_option("--seed", sc_seed, "seed for SVM cross-validation splits");
  score->add_option("--out", sc_out, "output score CSV")->required();

  // select
  auto* select = app.add_subcommand("select", "pick augmentation candidates from a score CSV");
  std::string se_scores, se_data, se_policy = "random_proportional", se_out;
  int se_k = 0, se_n = 0, se_folds = 5;
  bool se_inverse = false;
  std::vector<double> se_grid;
  std::uint64_t se_seed = 0;
  select->add_option("--policy", se_policy,
                     "baseline_uniform|random_proportional|deterministic_topk|vsv|"
                     "stratified_cluster|kdpp")
      ->check(CLI::IsMember({"baseline_uniform", "random_proportional", "deterministic_topk",
                             "vsv", "stratified_cluster", "kdpp"}));
  select->add_option("--scores", se_scores, "score CSV (policies that use scores)");
  select->add_option("--data", se_data, "feature CSV (vsv, stratified_cluster, kdpp)");
  select->add_option("--k", se_k, "budget (ignored by vsv)");
  select->add_option("--n", se_n, "population size for baseline_uniform without --scores");
  select->add_flag("--inverse", se_inverse, "invert the scores first");
  select->add_option("--svm-grid", se_grid, "SVM C grid (vsv)");
  select->add_option("--svm-folds", se_folds, "SVM cross-validation folds (vsv)");
  select->add_option("--seed", se_seed, "sampling seed");
  select->add_option("--out", se_out, "output CSV (round,index)")->required();

  // augment
  auto* augment = app.add_subcommand(
      "augment", "apply a transform grid to IDX images and write feature-space copies");
  std::string au_images, au_labels, au_transform, au_out;
  int au_a = 3, au_b = 8, au_ntrain = -1;
  std::uint64_t au_seed = 0;
  bool au_poisoned = false;
  augment->add_option("--images", au_images, "IDX image file")->required();
  augment->add_option("--labels", au_labels, "IDX label file")->required();
  augment->add_option("--class-a", au_a, "label mapped to +1");
  augment->add_option("--class-b", au_b, "label mapped to -1");
  augment->add_option("--n-train", au_ntrain, "sample size (-1 = all)");
  augment->add_option("--seed", au_seed, "sampling seed");
  augment->add_option("--transform", au_transform, "transform JSON")->required();
  augment->add_flag("--poisoned-test", au_poisoned,
                    "write originals + augmented copies as one feature CSV instead of a member CSV");
  augment->add_option("--out", au_out, "output CSV")->required();

  // run
  auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
  std::string run_config, run_out;
  int run_threads = 1;
  run->add_option("--config", run_config, "experiment config JSON")->required();
  run->add_option("--out", run_out, "report directory")->required();
  run->add_option("--threads", run_threads, "concurrent repeats (default 1)");

  // report
  auto* report = app.add_subcommand("report", "summarize a written report directory");
  std::string rep_dir;
  report->add_option("--dir", rep_dir, "report directory")->required();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "run brute-force verification suites");
  std::string or_suite = "all";
  oracle->add_option("--suite", or_suite, "all|loo|calculus|solver|dpp|sampler")
      ->check(CLI::IsMember({"all", "loo", "calculus", "solver", "dpp", "sampler"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  if (*ingest) {
    DatasetHandle data;
    aug_status s = aug_dataset_from_idx(in_images.c_str(), in_labels.c_str(), in_a, in_b,
                                        in_ntrain, in_seed, &data.ptr);
    if (s != AUG_OK) return fail(s);
    if ((s = aug_dataset_save_csv(data.ptr, in_out.c_str())) != AUG_OK) return fail(s);
    int n = 0, dim = 0, pos = 0, neg = 0;
    aug_dataset_size(data.ptr, &n);
    aug_dataset_feature_dim(data.ptr, &dim);
    aug_dataset_class_split(data.ptr, &pos, &neg);
    std::printf("wrote %s: %d examples, %d features, class split %d/%d\n", in_out.c_str(), n, dim,
                pos, neg);
    return 0;
  }

  if (*score) {
    DatasetHandle data;
    aug_status s = aug_dataset_load_csv(sc_data.c_str(), &data.ptr);
    if (s != AUG_OK) return fail(s);
    ScoresHandle scores;
    const aug_metric metric = metric_from_flag(sc_metric);
    if (metric == AUG_METRIC_MARGIN_ABS || metric == AUG_METRIC_MARGIN_INV) {
      s = aug_scores_margin(data.ptr, sc_grid.empty() ? nullptr : sc_grid.data(), sc_grid.size(),
                            sc_folds, sc_seed, metric, &scores.ptr);
      if (s != AUG_OK) return fail(s);
    } else {
      ModelHandle model;
      if (!sc_model_in.empty())
        s = aug_model_load(sc_model_in.c_str(), sc_C, sc_tol, sc_maxit, &model.ptr);
      else
        s = aug_fit_logistic(data.ptr, sc_C, sc_tol, sc_maxit, &model.ptr);
      if (s != AUG_OK) return fail(s);
      if (!sc_model_out.empty())
        if ((s = aug_model_save(model.ptr, sc_model_out.c_str())) != AUG_OK) return fail(s);
      if ((s = aug_scores_compute(model.ptr, data.ptr, metric, &scores.ptr)) != AUG_OK)
        return fail(s);
    }
    if ((s = aug_scores_save_csv(scores.ptr, sc_out.c_str())) != AUG_OK) return fail(s);
    int n = 0;
    aug_scores_size(scores.ptr, &n);
    std::printf("wrote %s: %d scores (%s)\n", sc_out.c_str(), n, sc_metric.c_str());
    return 0;
  }

  if (*select) {
    aug_status s = AUG_OK;
    ScoresHandle scores;
    if (!se_scores.empty()) {
      if ((s = aug_scores_load_csv(se_scores.c_str(), &scores.ptr)) != AUG_OK) return fail(s);
      if (se_inverse) {
        ScoresHandle inverted;
        if ((s = aug_scores_invert(scores.ptr, &inverted.ptr)) != AUG_OK) return fail(s);
        std::swap(scores.ptr, inverted.ptr);
      }
    }
    DatasetHandle data;
    if (!se_data.empty())
      if ((s = aug_dataset_load_csv(se_data.c_str(), &data.ptr)) != AUG_OK) return fail(s);

    IndicesHandle picks;
    if (se_policy == "baseline_uniform") {
      int n = se_n;
      if (n <= 0 && scores.ptr) aug_scores_size(scores.ptr, &n);
      if (n <= 0 && data.ptr) aug_dataset_size(data.ptr, &n);
      if (n <= 0) {
        std::fprintf(stderr, "augsel: baseline_uniform needs --n, --scores or --data\n");
        return 2;
      }
      s = aug_select_uniform(n, se_k, se_seed, &picks.ptr);
    } else if (se_policy == "random_proportional" || se_policy == "deterministic_topk") {
      if (!scores.ptr) {
        std::fprintf(stderr, "augsel: %s needs --scores\n", se_policy.c_str());
        return 2;
      }
      s = se_policy == "random_proportional"
              ? aug_select_proportional(scores.ptr, se_k, se_seed, &picks.ptr)
              : aug_select_topk(scores.ptr, se_k, &picks.ptr);
    } else if (se_policy == "vsv") {
      if (!data.ptr) {
        std::fprintf(stderr, "augsel: vsv needs --data\n");
        return 2;
      }
      s = aug_select_vsv(data.ptr, se_grid.empty() ? nullptr : se_grid.data(), se_grid.size(),
                         se_folds, se_seed, &picks.ptr);
    } else if (se_policy == "stratified_cluster") {
      if (!data.ptr) {
        std::fprintf(stderr, "augsel: stratified_cluster needs --data\n");
        return 2;
      }
      s = aug_select_stratified(data.ptr, scores.ptr, se_k, se_seed, &picks.ptr);
    } else {  // kdpp
      if (!data.ptr || !scores.ptr) {
        std::fprintf(stderr, "augsel: kdpp needs --data and --scores\n");
        return 2;
      }
      s = aug_select_kdpp(data.ptr, scores.ptr, se_k, se_seed, &picks.ptr);
    }
    if (s != AUG_OK) return fail(s);
    if ((s = aug_indices_save_csv(picks.ptr, se_out.c_str())) != AUG_OK) return fail(s);
    int n = 0;
    aug_indices_size(picks.ptr, &n);
    std::printf("wrote %s: %d indices (%s)\n", se_out.c_str(), n, se_policy.c_str());
    return 0;
  }

  if (*augment) {
    aug_status s =
        au_poisoned
            ? aug_write_poisoned_test_csv(au_images.c_str(), au_labels.c_str(), au_a, au_b,
                                          au_transform.c_str(), au_out.c_str())
            : aug_write_member_csv(au_images.c_str(), au_labels.c_str(), au_a, au_b, au_ntrain,
                                   au_seed, au_transform.c_str(), au_out.c_str());
    if (s != AUG_OK) return fail(s);
    std::printf("wrote %s\n", au_out.c_str());
    return 0;
  }

  if (*run) {
    aug_status s = aug_run_experiment(run_config.c_str(), run_out.c_str(), run_threads);
    if (s != AUG_OK) return fail(s);
    char* text = nullptr;
    if (aug_report_render(run_out.c_str(), &text) == AUG_OK) {
      std::fputs(text, stdout);
      aug_string_free(text);
    }
    return 0;
  }

  if (*report) {
    char* text = nullptr;
    aug_status s = aug_report_render(rep_dir.c_str(), &text);
    if (s != AUG_OK) return fail(s);
    std::fputs(text, stdout);
    aug_string_free(text);
    return 0;
  }

  if (*oracle) {
    int failed = 0;
    aug_status s = aug_run_oracles(
        or_suite.c_str(), [](const char* line, void*) { std::printf("%s\n", line); }, nullptr,
        &failed);
    if (s != AUG_OK) return fail(s);
    if (failed > 0) {
      std::fprintf(stderr, "augsel: %d oracle check(s) failed\n", failed);
      return 1;
    }
    std::printf("all oracle checks passed\n");
    return 0;
  }

  return 2;
}
