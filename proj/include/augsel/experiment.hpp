#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "augsel/augment.hpp"
#include "augsel/logistic.hpp"
#include "augsel/scores.hpp"
#include "augsel/stats.hpp"

namespace augsel {

// One augmentation policy: how to pick the next source point each round.
struct PolicyConfig {
  enum class Kind {
    baseline_uniform,
    random_proportional,
    deterministic_topk,
    vsv,
    stratified_cluster,
    kdpp,
  };

  Kind kind = Kind::baseline_uniform;
  Metric metric = Metric::uniform;
  bool update_scores = false;
  bool downweight = false;
  bool inverse = false;
  std::string name;  // optional; display_name() derives one otherwise

  bool is_deterministic() const;  // deterministic policies run a single repeat
  std::string display_name() const;
  void validate() const;
};

std::string policy_kind_name(PolicyConfig::Kind kind);
PolicyConfig::Kind policy_kind_from_name(const std::string& name);

// Fixed C, or a cross-validation sweep at every refit.
struct TrainSpec {
  bool use_cv = false;
  TrainConfig config;            // C is ignored when use_cv is set
  std::vector<double> cv_grid;
  int cv_folds = 5;
};

// Raw-image source: IDX pairs carved into a binary task; transforms run on
// the images themselves.
struct IdxSource {
  std::string train_images, train_labels;
  std::string test_images, test_labels;
  int class_a = 3, class_b = 8;
  int n_train = 1000;
  std::uint64_t sample_seed = 0;
  int n_test = 0;  // 0 = use every test example of the two classes
};

// Feature-space source: precomputed feature CSVs plus companion member CSVs
// holding the augmented rows (transforms cannot run on features).
struct CsvSource {
  std::string train, train_members;
  std::string test, test_members;
};

struct ExperimentConfig {
  std::variant<IdxSource, CsvSource> source;
  std::optional<TransformSpec> transform;  // required with IdxSource
  std::vector<PolicyConfig> policies;
  int budget = 0;
  std::vector<int> checkpoints;  // empty -> default_checkpoints(budget)
  int repeats = 5;
  std::uint64_t base_seed = 0;
  TrainSpec train;
  bool downweight_literal = false;  // divide by m instead of m+1
  int histogram_bins = 30;

  void validate() const;
};

std::vector<int> default_checkpoints(int budget);

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
TransformSpec transform_from_json_string(const std::string& json_text);
std::string canonical_config_json(const ExperimentConfig& config);
std::string config_hash_hex(const ExperimentConfig& config);

struct RepeatResult {
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> curve;  // (budget, poisoned accuracy)
  std::vector<double> checkpoint_total_weight;   // aligned with curve
  double auc = 0.0;
};

struct PolicyOutcome {
  PolicyConfig policy;
  int realized_budget = 0;  // == config budget except for vsv
  std::vector<RepeatResult> repeats;
  double auc_mean = 0.0;
  std::optional<double> auc_std;  // absent for single-repeat policies
  // first repeat: per original point, |I_LOO| under the initial and final fit
  std::vector<std::pair<double, double>> influence_pairs;
  std::optional<SpearmanResult> pair_correlation;
};

struct ExperimentReport {
  std::string config_json;
  std::string config_hash;
  int n_train = 0, feature_dim = 0, member_count = 0, n_test_rows = 0;
  int split_positive = 0, split_negative = 0;
  double unaugmented_accuracy = 0.0;
  std::vector<std::pair<Metric, Histogram>> initial_histograms;
  std::vector<PolicyOutcome> policies;
};

// Runs every policy in the config. Repeats execute independently (optionally
// in parallel up to `threads`); results are identical regardless of the
// thread count.
ExperimentReport run_experiment(const ExperimentConfig& config, int threads = 1);

// curves.csv, auc.csv, histogram.csv, influence_pairs.csv, report.json.
void write_report_files(const ExperimentReport& report, const std::filesystem::path& out_dir);

// Human-readable AUC table from a written report directory.
std::string render_report_summary(const std::filesystem::path& report_dir);

}  // namespace augsel
