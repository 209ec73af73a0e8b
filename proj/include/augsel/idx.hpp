#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "augsel/image.hpp"

namespace augsel {

// MNIST-style IDX pair: big-endian, magic 0x00000803 for images and
// 0x00000801 for labels. Returns one (image, label) per record, in file
// order; image and label counts must agree.
std::vector<std::pair<RawImage, int>> load_idx(const std::filesystem::path& images_path,
                                               const std::filesystem::path& labels_path);

// Writers for the same format (fixture/demo tooling). All images must share
// one shape with a single channel.
void write_idx_images(const std::filesystem::path& path, const std::vector<RawImage>& images);
void write_idx_labels(const std::filesystem::path& path, const std::vector<int>& labels);

}  // namespace augsel
