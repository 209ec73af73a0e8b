#pragma once

#include <filesystem>

#include "augsel/image.hpp"
#include "augsel/rng.hpp"

// Synthetic two-class digit-like corpus ("3" vs "8"): two stacked rings where
// a left-side gap opens an 8 into a 3. Style latents (position, radii, stroke
// thickness, rotation, intensity, gap width) vary per sample, and a small
// fraction of each class sits near the boundary (partially open 8s, nearly
// closed 3s). Written as standard IDX files, it stands in for MNIST-style
// data in demos and tests without any download.

namespace augsel::synth {

struct Corpus {
  std::vector<RawImage> images;
  std::vector<int> labels;  // literal 3 / 8
};

// One 28x28 glyph; `closed` draws an 8-like figure, otherwise a 3-like one.
RawImage render_ring_glyph(bool closed, rng::Engine& eng);

// n glyphs, classes alternating, fully independent styles.
Corpus glyph_corpus(int n, std::uint64_t seed);

// n glyphs drawn from n_templates fixed style templates plus per-pixel
// Gaussian noise: a low-diversity corpus whose points have close neighbors.
Corpus template_corpus(int n, int n_templates, double noise_sd, std::uint64_t seed);

void write_idx_corpus(const Corpus& corpus, const std::filesystem::path& images_path,
                      const std::filesystem::path& labels_path);

}  // namespace augsel::synth
