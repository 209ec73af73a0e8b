#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "augsel/dataset.hpp"

namespace augsel {

// A deterministic, exhaustive augmentation map over raster images. Expanding
// an example yields one member per grid element, in a fixed order:
//   translate: up, down, left, right (at the configured offset)
//   rotate:    angles ascending
//   crop:      borders ascending
// The identity transform is never part of a grid.
struct TransformSpec {
  enum class Kind { translate, rotate, crop };

  Kind kind = Kind::translate;
  int offset_px = 0;             // translate
  std::vector<double> angles;    // rotate, degrees
  std::vector<int> borders;      // crop, pixels

  int grid_size() const;
  std::string describe() const;

  static TransformSpec make_translate(int offset_px);
  static TransformSpec make_rotate(std::vector<double> angles);
  // `count` angles evenly spaced over [-max_degrees, +max_degrees] with the
  // identity removed (an odd count therefore yields count-1 members).
  static TransformSpec evenly_spaced_rotations(double max_degrees, int count);
  static TransformSpec make_crop(std::vector<int> borders);
};

struct AugmentationFamily {
  int origin_id = 0;
  std::vector<LabeledExample> members;  // augmented copies, origin's label
  std::vector<RawImage> images;         // aligned with members
};

AugmentationFamily expand(const TransformSpec& spec, const LabeledExample& example,
                          const RawImage& image);

// Original test examples followed by every augmented copy of every test
// example (originals first, then per-example member blocks), all weight 1.
Dataset build_poisoned_test(const std::vector<RawImage>& images, const std::vector<int>& labels,
                            const TransformSpec& spec);

// Companion table for feature-space runs where transforms cannot be applied:
// per original example, its precomputed augmented feature rows.
// CSV columns: origin_id, member_index, features...
struct MemberTable {
  std::map<int, std::vector<Eigen::VectorXd>> members;
  int feature_dim = 0;
  int member_count = 0;  // uniform across origins

  const std::vector<Eigen::VectorXd>& family(int origin_id) const;
};

MemberTable load_member_csv(const std::filesystem::path& path, int expected_dim, int n_origins);
void save_member_csv(const std::filesystem::path& path,
                     const std::vector<AugmentationFamily>& families);

}  // namespace augsel
