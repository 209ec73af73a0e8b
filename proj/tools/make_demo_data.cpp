// Generates the synthetic "3 vs 8" ring-glyph corpus as IDX files, so the
// experiment pipeline can be exercised without downloading a dataset.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "augsel/common.hpp"
#include "augsel/synthdata.hpp"

int main(int argc, char** argv) {
  CLI::App app{"write a synthetic two-class glyph corpus as IDX files"};
  std::string out_dir = ".";
  int n_train = 4000, n_test = 1500, templates = 0;
  double noise = 4.0;
  std::uint64_t seed = 1;
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--n-train", n_train, "training pool size");
  app.add_option("--n-test", n_test, "test pool size");
  app.add_option("--templates", templates,
                 "draw from this many fixed style templates instead of fully varied styles");
  app.add_option("--noise", noise, "per-pixel noise for template mode");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    using augsel::synth::Corpus;
    Corpus train = templates > 0
                       ? augsel::synth::template_corpus(n_train, templates, noise, seed)
                       : augsel::synth::glyph_corpus(n_train, seed);
    Corpus test = templates > 0
                      ? augsel::synth::template_corpus(n_test, templates, noise, seed + 1)
                      : augsel::synth::glyph_corpus(n_test, seed + 1);
    augsel::synth::write_idx_corpus(train, dir / "train-images.idx", dir / "train-labels.idx");
    augsel::synth::write_idx_corpus(test, dir / "test-images.idx", dir / "test-labels.idx");
    std::printf("wrote %d train and %d test glyphs under %s\n", n_train, n_test, out_dir.c_str());
    return 0;
  } catch (const augsel::Error& e) {
    std::fprintf(stderr, "make-demo-data: %s\n", e.what());
    return 2;
  }
}
