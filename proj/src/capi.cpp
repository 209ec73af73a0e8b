#include "augsel/augsel.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "augsel/dataset.hpp"
#include "augsel/dpp.hpp"
#include "augsel/experiment.hpp"
#include "augsel/idx.hpp"
#include "augsel/influence.hpp"
#include "augsel/kmeans.hpp"
#include "augsel/oracle.hpp"
#include "augsel/select.hpp"
#include "augsel/svm.hpp"

using namespace augsel;

struct aug_dataset {
  Dataset data;
  int n_positive = 0;
  int n_negative = 0;
};
struct aug_model {
  ModelParams params;
  TrainConfig config;
};
struct aug_scores {
  ScoreVector scores;
};
struct aug_indices {
  std::vector<int> indices;
};

namespace {

thread_local std::string t_last_error;

aug_status status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io:
      return AUG_ERROR_IO;
    case ErrorKind::format:
    case ErrorKind::parse:
      return AUG_ERROR_FORMAT;
    case ErrorKind::convergence:
    case ErrorKind::conditioning:
      return AUG_ERROR_NUMERIC;
    default:
      return AUG_ERROR_INVALID;
  }
}

template <typename Fn>
aug_status guarded(Fn&& fn) {
  try {
    fn();
    return AUG_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return AUG_ERROR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return AUG_ERROR_INTERNAL;
  }
}

aug_status check_arg(bool ok, const char* msg) {
  if (ok) return AUG_OK;
  t_last_error = msg;
  return AUG_ERROR_INVALID;
}

Metric to_metric(aug_metric m) {
  switch (m) {
    case AUG_METRIC_LOSS:
      return Metric::loss;
    case AUG_METRIC_INFLUENCE:
      return Metric::influence;
    case AUG_METRIC_MARGIN_ABS:
      return Metric::margin_abs;
    case AUG_METRIC_MARGIN_INV:
      return Metric::margin_inv;
    case AUG_METRIC_UNIFORM:
      return Metric::uniform;
  }
  raise(ErrorKind::invalid_argument, "unknown metric value");
}

Eigen::MatrixXd feature_matrix(const Dataset& data) {
  Eigen::MatrixXd X(data.size(), data.feature_dim);
  for (int i = 0; i < data.size(); ++i) X.row(i) = data.examples[static_cast<std::size_t>(i)].features;
  return X;
}

aug_status make_indices(std::vector<int> v, aug_indices** out) {
  auto handle = std::make_unique<aug_indices>();
  handle->indices = std::move(v);
  *out = handle.release();
  return AUG_OK;
}

}  // namespace

extern "C" {

const char* aug_version(void) { return kVersion; }

const char* aug_last_error(void) { return t_last_error.c_str(); }

void aug_string_free(char* s) { std::free(s); }

/* ---- datasets ---- */

aug_status aug_dataset_load_csv(const char* path, aug_dataset** out) {
  if (auto s = check_arg(path && out, "path and out must not be NULL")) return s;
  return guarded([&] {
    auto handle = std::make_unique<aug_dataset>();
    handle->data = load_feature_csv(path);
    for (const auto& ex : handle->data.examples)
      (ex.label > 0 ? handle->n_positive : handle->n_negative)++;
    *out = handle.release();
  });
}

aug_status aug_dataset_from_idx(const char* images_path, const char* labels_path, int class_a,
                                int class_b, int n_train, uint64_t seed, aug_dataset** out) {
  if (auto s = check_arg(images_path && labels_path && out, "paths and out must not be NULL"))
    return s;
  return guarded([&] {
    auto pairs = load_idx(images_path, labels_path);
    BinaryTask task = n_train < 0 ? filter_binary(pairs, class_a, class_b)
                                  : make_binary_task(pairs, class_a, class_b, n_train, seed);
    auto handle = std::make_unique<aug_dataset>();
    handle->data = std::move(task.data);
    handle->n_positive = task.n_positive;
    handle->n_negative = task.n_negative;
    *out = handle.release();
  });
}

aug_status aug_dataset_save_csv(const aug_dataset* data, const char* path) {
  if (auto s = check_arg(data && path, "data and path must not be NULL")) return s;
  return guarded([&] { save_feature_csv(data->data, path); });
}

aug_status aug_dataset_size(const aug_dataset* data, int* out) {
  if (auto s = check_arg(data && out, "data and out must not be NULL")) return s;
  *out = data->data.size();
  return AUG_OK;
}

aug_status aug_dataset_feature_dim(const aug_dataset* data, int* out) {
  if (auto s = check_arg(data && out, "data and out must not be NULL")) return s;
  *out = data->data.feature_dim;
  return AUG_OK;
}

aug_status aug_dataset_total_weight(const aug_dataset* data, double* out) {
  if (auto s = check_arg(data && out, "data and out must not be NULL")) return s;
  *out = data->data.total_weight();
  return AUG_OK;
}

aug_status aug_dataset_class_split(const aug_dataset* data, int* positive, int* negative) {
  if (auto s = check_arg(data && positive && negative, "arguments must not be NULL")) return s;
  *positive = data->n_positive;
  *negative = data->n_negative;
  return AUG_OK;
}

void aug_dataset_free(aug_dataset* data) { delete data; }

/* ---- augmentation ---- */

aug_status aug_write_member_csv(const char* images_path, const char* labels_path, int class_a,
                                int class_b, int n_train, uint64_t seed,
                                const char* transform_json, const char* out_csv) {
  if (auto s = check_arg(images_path && labels_path && transform_json && out_csv,
                         "arguments must not be NULL"))
    return s;
  return guarded([&] {
    TransformSpec spec = transform_from_json_string(transform_json);
    auto pairs = load_idx(images_path, labels_path);
    BinaryTask task = n_train < 0 ? filter_binary(pairs, class_a, class_b)
                                  : make_binary_task(pairs, class_a, class_b, n_train, seed);
    std::vector<AugmentationFamily> families;
    families.reserve(task.data.examples.size());
    for (std::size_t i = 0; i < task.data.examples.size(); ++i)
      families.push_back(expand(spec, task.data.examples[i], task.images[i]));
    save_member_csv(out_csv, families);
  });
}

aug_status aug_write_poisoned_test_csv(const char* images_path, const char* labels_path,
                                       int class_a, int class_b, const char* transform_json,
                                       const char* out_csv) {
  if (auto s = check_arg(images_path && labels_path && transform_json && out_csv,
                         "arguments must not be NULL"))
    return s;
  return guarded([&] {
    TransformSpec spec = transform_from_json_string(transform_json);
    auto pairs = load_idx(images_path, labels_path);
    BinaryTask task = filter_binary(pairs, class_a, class_b);
    std::vector<int> labels;
    for (const auto& ex : task.data.examples) labels.push_back(ex.label);
    Dataset poisoned = build_poisoned_test(task.images, labels, spec);
    save_feature_csv(poisoned, out_csv);
  });
}

/* ---- models ---- */

aug_status aug_fit_logistic(const aug_dataset* data, double C, double tol, int max_iter,
                            aug_model** out) {
  if (auto s = check_arg(data && out, "data and out must not be NULL")) return s;
  return guarded([&] {
    auto handle = std::make_unique<aug_model>();
    handle->config.C = C;
    handle->config.tol = tol;
    handle->config.max_iter = max_iter;
    handle->params = fit_logistic(data->data, handle->config);
    *out = handle.release();
  });
}

aug_status aug_model_accuracy(const aug_model* model, const aug_dataset* data, double* out) {
  if (auto s = check_arg(model && data && out, "arguments must not be NULL")) return s;
  return guarded([&] { *out = accuracy(model->params, data->data); });
}

aug_status aug_model_save(const aug_model* model, const char* path) {
  if (auto s = check_arg(model && path, "model and path must not be NULL")) return s;
  return guarded([&] { save_model(model->params, path); });
}

aug_status aug_model_load(const char* path, double C, double tol, int max_iter, aug_model** out) {
  if (auto s = check_arg(path && out, "path and out must not be NULL")) return s;
  return guarded([&] {
    auto handle = std::make_unique<aug_model>();
    handle->config.C = C;
    handle->config.tol = tol;
    handle->config.max_iter = max_iter;
    handle->config.validate();
    handle->params = load_model(path);
    *out = handle.release();
  });
}

void aug_model_free(aug_model* model) { delete model; }

/* ---- scores ---- */

aug_status aug_scores_compute(const aug_model* model, const aug_dataset* data, aug_metric metric,
                              aug_scores** out) {
  if (auto s = check_arg(model && data && out, "arguments must not be NULL")) return s;
  return guarded([&] {
    Metric m = to_metric(metric);
    require(m == Metric::loss || m == Metric::influence, ErrorKind::invalid_argument,
            "aug_scores_compute handles loss and influence; use aug_scores_margin");
    auto handle = std::make_unique<aug_scores>();
    if (m == Metric::influence) {
      HessianFactor factor =
          HessianFactor::factorize(hessian(model->params, data->data, model->config));
      handle->scores = score_all(model->params, &factor, data->data, m);
    } else {
      handle->scores = score_all(model->params, nullptr, data->data, m);
    }
    *out = handle.release();
  });
}

aug_status aug_scores_margin(const aug_dataset* data, const double* c_grid, size_t grid_len,
                             int folds, uint64_t seed, aug_metric variant, aug_scores** out) {
  if (auto s = check_arg(data && out, "data and out must not be NULL")) return s;
  if (auto s = check_arg(grid_len == 0 || c_grid != nullptr, "c_grid is NULL with grid_len > 0"))
    return s;
  return guarded([&] {
    Metric m = to_metric(variant);
    require(m == Metric::margin_abs || m == Metric::margin_inv, ErrorKind::invalid_argument,
            "variant must be a margin metric");
    std::vector<double> grid(c_grid, c_grid + grid_len);
    if (grid.empty()) grid = {0.01, 0.1, 1.0, 10.0, 100.0};
    SvmFit svm = fit_svm(data->data, grid, folds, seed);
    auto handle = std::make_unique<aug_scores>();
    handle->scores = margin_scores(
        svm, data->data, m == Metric::margin_abs ? MarginVariant::absolute : MarginVariant::inverse);
    *out = handle.release();
  });
}

aug_status aug_scores_invert(const aug_scores* scores, aug_scores** out) {
  if (auto s = check_arg(scores && out, "scores and out must not be NULL")) return s;
  return guarded([&] {
    auto handle = std::make_unique<aug_scores>();
    handle->scores = invert_scores(scores->scores);
    *out = handle.release();
  });
}

aug_status aug_scores_save_csv(const aug_scores* scores, const char* path) {
  if (auto s = check_arg(scores && path, "scores and path must not be NULL")) return s;
  return guarded([&] { save_scores_csv(scores->scores, path); });
}

aug_status aug_scores_load_csv(const char* path, aug_scores** out) {
  if (auto s = check_arg(path && out, "path and out must not be NULL")) return s;
  return guarded([&] {
    auto handle = std::make_unique<aug_scores>();
    handle->scores = load_scores_csv(path);
    *out = handle.release();
  });
}

aug_status aug_scores_size(const aug_scores* scores, int* out) {
  if (auto s = check_arg(scores && out, "scores and out must not be NULL")) return s;
  *out = scores->scores.size();
  return AUG_OK;
}

aug_status aug_scores_get(const aug_scores* scores, int index, double* out) {
  if (auto s = check_arg(scores && out, "scores and out must not be NULL")) return s;
  if (auto s = check_arg(index >= 0 && index < scores->scores.size(), "index out of range"))
    return s;
  *out = scores->scores.values[static_cast<std::size_t>(index)];
  return AUG_OK;
}

void aug_scores_free(aug_scores* scores) { delete scores; }

/* ---- selection ---- */

aug_status aug_select_uniform(int n, int k, uint64_t seed, aug_indices** out) {
  if (auto s = check_arg(out != nullptr, "out must not be NULL")) return s;
  return guarded([&] {
    auto eng = rng::make_engine(seed);
    make_indices(sample_uniform(n, k, eng), out);
  });
}

aug_status aug_select_proportional(const aug_scores* scores, int k, uint64_t seed,
                                   aug_indices** out) {
  if (auto s = check_arg(scores && out, "scores and out must not be NULL")) return s;
  return guarded([&] {
    auto eng = rng::make_engine(seed);
    make_indices(sample_proportional(scores->scores, k, eng), out);
  });
}

aug_status aug_select_topk(const aug_scores* scores, int k, aug_indices** out) {
  if (auto s = check_arg(scores && out, "scores and out must not be NULL")) return s;
  return guarded([&] { make_indices(select_topk(scores->scores, k), out); });
}

aug_status aug_select_vsv(const aug_dataset* data, const double* c_grid, size_t grid_len,
                          int folds, uint64_t seed, aug_indices** out) {
  if (auto s = check_arg(data && out, "data and out must not be NULL")) return s;
  if (auto s = check_arg(grid_len == 0 || c_grid != nullptr, "c_grid is NULL with grid_len > 0"))
    return s;
  return guarded([&] {
    std::vector<double> grid(c_grid, c_grid + grid_len);
    if (grid.empty()) grid = {0.01, 0.1, 1.0, 10.0, 100.0};
    SvmFit svm = fit_svm(data->data, grid, folds, seed);
    make_indices(vsv_select(svm), out);
  });
}

aug_status aug_select_stratified(const aug_dataset* data, const aug_scores* scores, int k,
                                 uint64_t seed, aug_indices** out) {
  if (auto s = check_arg(data && out, "data and out must not be NULL")) return s;
  return guarded([&] {
    if (scores)
      require(scores->scores.size() == data->data.size(), ErrorKind::invalid_argument,
              "score vector length does not match dataset");
    KmeansResult km = kmeans(feature_matrix(data->data), k, rng::derive(seed, {1}));
    auto eng = rng::make_engine(rng::derive(seed, {2}));
    make_indices(stratified_select(km.assignments, k, scores ? &scores->scores : nullptr, eng),
                 out);
  });
}

aug_status aug_select_kdpp(const aug_dataset* data, const aug_scores* scores, int k, uint64_t seed,
                           aug_indices** out) {
  if (auto s = check_arg(data && scores && out, "arguments must not be NULL")) return s;
  return guarded([&] {
    require(scores->scores.size() == data->data.size(), ErrorKind::invalid_argument,
            "score vector length does not match dataset");
    DppKernel kernel = build_dpp_kernel(feature_matrix(data->data), scores->scores);
    auto eng = rng::make_engine(seed);
    make_indices(sample_kdpp(kernel, k, eng), out);
  });
}

aug_status aug_indices_size(const aug_indices* indices, int* out) {
  if (auto s = check_arg(indices && out, "indices and out must not be NULL")) return s;
  *out = static_cast<int>(indices->indices.size());
  return AUG_OK;
}

aug_status aug_indices_get(const aug_indices* indices, int position, int* out) {
  if (auto s = check_arg(indices && out, "indices and out must not be NULL")) return s;
  if (auto s = check_arg(position >= 0 && position < static_cast<int>(indices->indices.size()),
                         "position out of range"))
    return s;
  *out = indices->indices[static_cast<std::size_t>(position)];
  return AUG_OK;
}

aug_status aug_indices_save_csv(const aug_indices* indices, const char* path) {
  if (auto s = check_arg(indices && path, "indices and path must not be NULL")) return s;
  return guarded([&] {
    std::ofstream outfile(path);
    require(static_cast<bool>(outfile), ErrorKind::io,
            std::string("cannot open for writing: ") + path);
    outfile << "round,index\n";
    for (std::size_t i = 0; i < indices->indices.size(); ++i)
      outfile << (i + 1) << ',' << indices->indices[i] << '\n';
    require(static_cast<bool>(outfile), ErrorKind::io, std::string("write failed: ") + path);
  });
}

void aug_indices_free(aug_indices* indices) { delete indices; }

/* ---- experiments ---- */

aug_status aug_run_experiment(const char* config_path, const char* out_dir, int threads) {
  if (auto s = check_arg(config_path && out_dir, "config_path and out_dir must not be NULL"))
    return s;
  return guarded([&] {
    ExperimentConfig config = load_experiment_config(config_path);
    ExperimentReport report = run_experiment(config, threads);
    write_report_files(report, out_dir);
  });
}

aug_status aug_report_render(const char* report_dir, char** out_text) {
  if (auto s = check_arg(report_dir && out_text, "report_dir and out_text must not be NULL"))
    return s;
  return guarded([&] {
    std::string text = render_report_summary(report_dir);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    require(buf != nullptr, ErrorKind::io, "out of memory");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out_text = buf;
  });
}

/* ---- oracles ---- */

aug_status aug_run_oracles(const char* suite, aug_line_callback callback, void* ctx,
                           int* n_failed) {
  if (auto s = check_arg(n_failed != nullptr, "n_failed must not be NULL")) return s;
  return guarded([&] {
    auto checks = oracle::run_suite(suite ? suite : "all");
    int failed = 0;
    for (const auto& check : checks) {
      if (!check.passed) ++failed;
      if (callback) {
        std::string line =
            std::string(check.passed ? "PASS" : "FAIL") + " " + check.name + ": " + check.detail;
        callback(line.c_str(), ctx);
      }
    }
    *n_failed = failed;
  });
}

}  // extern "C"
