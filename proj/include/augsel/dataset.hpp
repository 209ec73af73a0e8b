#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <utility>
#include <vector>

#include "augsel/image.hpp"

namespace augsel {

// One weighted training point. Labels are +/-1 internally; external 0/1
// labels are mapped at the file boundary. origin_id is the index of the
// source example this one was derived from (itself for originals), so a
// point's augmentation family can be located later.
struct LabeledExample {
  Eigen::VectorXd features;
  int label = 1;  // +1 or -1
  double weight = 1.0;
  int origin_id = 0;
};

struct Dataset {
  std::vector<LabeledExample> examples;
  int feature_dim = 0;

  int size() const { return static_cast<int>(examples.size()); }
  double total_weight() const;
  void push_back(LabeledExample ex);
  // Throws unless nonempty, weights are finite and nonnegative with positive
  // total, and both labels carry positive weight.
  void validate_for_fit() const;
};

// Column-oriented view used by the solvers: X holds one example per row.
struct DesignMatrix {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd w;
};

DesignMatrix to_design(const Dataset& data);

// Plain numeric CSV: label column (+/-1 or 0/1) followed by feature columns.
// Lines starting with '#' and an optional non-numeric header row are skipped.
Dataset load_feature_csv(const std::filesystem::path& path);
void save_feature_csv(const Dataset& data, const std::filesystem::path& path);

// A binary classification task carved out of labeled images. class_a maps to
// +1 and class_b to -1; features are pixels flattened and scaled to [0, 1].
struct BinaryTask {
  Dataset data;
  std::vector<RawImage> images;  // aligned with data.examples
  int n_positive = 0;
  int n_negative = 0;
};

// Samples exactly n_train examples uniformly without replacement from the
// two requested classes; deterministic for a fixed seed.
BinaryTask make_binary_task(const std::vector<std::pair<RawImage, int>>& pairs, int class_a,
                            int class_b, int n_train, std::uint64_t seed);

// All examples of the two classes, in file order (used for test sets).
BinaryTask filter_binary(const std::vector<std::pair<RawImage, int>>& pairs, int class_a,
                         int class_b);

}  // namespace augsel
