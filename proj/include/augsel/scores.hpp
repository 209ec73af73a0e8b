#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "augsel/common.hpp"

namespace augsel {

enum class Metric { loss, influence, margin_abs, margin_inv, uniform };

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

// Per-training-point augmentation scores: nonnegative, finite, one per
// example, tagged with the metric that produced them and a counter
// identifying the fit ("model_version").
struct ScoreVector {
  std::vector<double> values;
  Metric metric = Metric::uniform;
  bool inverted = false;
  int model_version = 0;

  int size() const { return static_cast<int>(values.size()); }
  void validate() const;
};

// CSV columns: index, score, metric, model_version.
void save_scores_csv(const ScoreVector& scores, const std::filesystem::path& path);
ScoreVector load_scores_csv(const std::filesystem::path& path);

}  // namespace augsel
