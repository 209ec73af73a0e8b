#include <doctest.h>

#include <functional>

#include "augsel/augment.hpp"
#include "augsel/rng.hpp"

using namespace augsel;

namespace {

RawImage random_image(int w, int h, std::uint64_t seed) {
  RawImage img = RawImage::zeros(w, h, 1);
  auto eng = rng::make_engine(seed);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng::below(eng, 256));
  return img;
}

// independent index-remap oracle for integer shifts
RawImage translate_oracle(const RawImage& img, int dx, int dy) {
  RawImage out = RawImage::zeros(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      int tx = x + dx, ty = y + dy;
      if (tx >= 0 && tx < img.width && ty >= 0 && ty < img.height)
        for (int c = 0; c < img.channels; ++c) out.at(tx, ty, c) = img.at(x, y, c);
    }
  return out;
}

LabeledExample example_for(const RawImage& img, int label, int origin) {
  LabeledExample ex;
  auto flat = flatten_scaled(img);
  ex.features = Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
  ex.label = label;
  ex.origin_id = origin;
  return ex;
}

}  // namespace

TEST_SUITE("transforms") {
  TEST_CASE("zero translate is bit-identical") {
    RawImage img = random_image(9, 7, 1);
    CHECK(translate(img, 0, 0).pixels == img.pixels);
  }

  TEST_CASE("single lit pixel moves with the offset") {
    RawImage img = RawImage::zeros(3, 3, 1);
    img.at(1, 1) = 200;
    RawImage out = translate(img, 1, 0);
    CHECK(out.at(2, 1) == 200);
    int lit = 0;
    for (auto p : out.pixels) lit += p != 0;
    CHECK(lit == 1);
  }

  TEST_CASE("translate matches the index-remap oracle bit-exactly") {
    RawImage img = random_image(11, 8, 5);
    for (auto [dx, dy] : {std::pair{2, 0}, {0, -3}, {-1, 1}, {4, -2}})
      CHECK(translate(img, dx, dy).pixels == translate_oracle(img, dx, dy).pixels);
  }

  TEST_CASE("shift right then left zeroes the leftmost column only") {
    RawImage img = random_image(6, 6, 9);
    RawImage round = translate(translate(img, 1, 0), -1, 0);
    RawImage expect = img;
    for (int y = 0; y < 6; ++y) expect.at(5, y) = 0;  // column shifted out of frame
    CHECK(round.pixels == expect.pixels);
  }

  TEST_CASE("translate conserves intensity minus what leaves the frame") {
    RawImage img = random_image(8, 8, 11);
    const int dx = 3;
    long kept = 0;
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8 - dx; ++x) kept += img.at(x, y);
    CHECK(translate(img, dx, 0).total_intensity() == kept);
  }

  TEST_CASE("oversized offsets are rejected") {
    RawImage img = random_image(5, 5, 2);
    CHECK_THROWS_AS(translate(img, 5, 0), Error);
    CHECK_THROWS_AS(translate(img, 0, -5), Error);
  }

  TEST_CASE("rotate by zero returns the image unchanged") {
    RawImage img = random_image(7, 7, 3);
    CHECK(rotate(img, 0.0).pixels == img.pixels);
  }

  TEST_CASE("uniform image keeps a uniform interior under rotation") {
    RawImage img = RawImage::zeros(9, 9, 1);
    for (auto& p : img.pixels) p = 180;
    RawImage out = rotate(img, 17.0);
    for (int y = 2; y < 7; ++y)
      for (int x = 2; x < 7; ++x) CHECK(out.at(x, y) == 180);
  }

  TEST_CASE("ninety degrees matches the coordinate-permutation oracle") {
    RawImage img = random_image(4, 4, 13);
    RawImage out = rotate(img, 90.0);
    // inverse map at 90 degrees: source = (cx + (y-cy), cy - (x-cx))
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) {
        int sx = static_cast<int>(1.5 + (y - 1.5));
        int sy = static_cast<int>(1.5 - (x - 1.5));
        int diff = static_cast<int>(out.at(x, y)) - static_cast<int>(img.at(sx, sy));
        CHECK(std::abs(diff) <= 1);
      }
  }

  TEST_CASE("crop_zoom keeps constant fields constant") {
    RawImage img = RawImage::zeros(10, 10, 1);
    for (auto& p : img.pixels) p = 99;
    for (int border : {1, 2, 3, 4}) {
      RawImage out = crop_zoom(img, border);
      for (auto p : out.pixels) CHECK(p == 99);
    }
  }

  TEST_CASE("crop border bounds are enforced") {
    RawImage img = random_image(6, 6, 17);
    CHECK_THROWS_AS(crop_zoom(img, 0), Error);
    CHECK_THROWS_AS(crop_zoom(img, 3), Error);
  }

  TEST_CASE("crop_zoom matches an explicit crop-then-resample oracle") {
    RawImage img = random_image(6, 6, 19);
    const int b = 1;
    RawImage out = crop_zoom(img, b);
    const int cw = 4;
    // independent two-step oracle: materialize the crop, then resample it
    std::vector<double> crop(cw * cw);
    for (int y = 0; y < cw; ++y)
      for (int x = 0; x < cw; ++x) crop[static_cast<std::size_t>(y * cw + x)] = img.at(x + b, y + b);
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) {
        double fx = std::clamp((x + 0.5) * cw / 6.0 - 0.5, 0.0, cw - 1.0);
        double fy = std::clamp((y + 0.5) * cw / 6.0 - 0.5, 0.0, cw - 1.0);
        int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
        double ax = fx - x0, ay = fy - y0;
        auto at = [&](int xx, int yy) {
          xx = std::clamp(xx, 0, cw - 1);
          yy = std::clamp(yy, 0, cw - 1);
          return crop[static_cast<std::size_t>(yy * cw + xx)];
        };
        double v = (1 - ax) * (1 - ay) * at(x0, y0) + ax * (1 - ay) * at(x0 + 1, y0) +
                   (1 - ax) * ay * at(x0, y0 + 1) + ax * ay * at(x0 + 1, y0 + 1);
        CHECK(static_cast<int>(out.at(x, y)) == static_cast<int>(std::lround(v)));
      }
  }

  TEST_CASE("grid sizes follow the transform definitions") {
    CHECK(TransformSpec::make_translate(2).grid_size() == 4);
    CHECK(TransformSpec::evenly_spaced_rotations(30.0, 15).grid_size() == 14);
    CHECK(TransformSpec::make_crop({1, 2, 3, 4, 5, 6}).grid_size() == 6);
    CHECK(TransformSpec::make_rotate({-5.0, -2.5, 2.5, 5.0}).grid_size() == 4);
  }

  TEST_CASE("identity grid entries are rejected at construction") {
    CHECK_THROWS_AS(TransformSpec::make_translate(0), Error);
    CHECK_THROWS_AS(TransformSpec::make_rotate({0.0, 5.0}), Error);
    CHECK_THROWS_AS(TransformSpec::make_rotate({}), Error);
    CHECK_THROWS_AS(TransformSpec::make_crop({0}), Error);
    CHECK_THROWS_AS(TransformSpec::make_crop({}), Error);
  }

  TEST_CASE("expand produces one member per grid element with labels kept") {
    RawImage img = random_image(12, 12, 23);
    LabeledExample ex = example_for(img, -1, 7);
    const TransformSpec spec = TransformSpec::evenly_spaced_rotations(30.0, 15);
    AugmentationFamily fam = expand(spec, ex, img);
    REQUIRE(static_cast<int>(fam.members.size()) == 14);
    CHECK(fam.origin_id == 7);
    for (const auto& m : fam.members) {
      CHECK(m.label == -1);
      CHECK(m.origin_id == 7);
      CHECK(static_cast<int>(m.features.size()) == 144);
    }
    // deterministic across calls
    AugmentationFamily fam2 = expand(spec, ex, img);
    for (std::size_t i = 0; i < fam.members.size(); ++i)
      CHECK(fam.members[i].features == fam2.members[i].features);
  }

  TEST_CASE("poisoned test set is originals followed by all copies") {
    std::vector<RawImage> imgs;
    std::vector<int> labels;
    for (int i = 0; i < 5; ++i) {
      imgs.push_back(random_image(8, 8, 29 + static_cast<std::uint64_t>(i)));
      labels.push_back(i % 2 ? 1 : -1);
    }
    const TransformSpec spec = TransformSpec::make_translate(2);
    Dataset poisoned = build_poisoned_test(imgs, labels, spec);
    REQUIRE(poisoned.size() == 5 * (1 + 4));
    for (int i = 0; i < 5; ++i) {
      CHECK(poisoned.examples[static_cast<std::size_t>(i)].origin_id == i);
      CHECK(poisoned.examples[static_cast<std::size_t>(i)].label == labels[static_cast<std::size_t>(i)]);
    }
    // member block of test example i sits at 5 + 4*i, same label as its origin
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j) {
        const auto& m = poisoned.examples[static_cast<std::size_t>(5 + 4 * i + j)];
        CHECK(m.origin_id == i);
        CHECK(m.label == labels[static_cast<std::size_t>(i)]);
        CHECK(m.weight == 1.0);
      }
    CHECK_THROWS_AS(build_poisoned_test({}, {}, spec), Error);
  }

  TEST_CASE("member csv round-trips families keyed by origin") {
    RawImage img = random_image(5, 5, 37);
    std::vector<AugmentationFamily> families;
    const TransformSpec spec = TransformSpec::make_crop({1, 2});
    for (int i = 0; i < 3; ++i) families.push_back(expand(spec, example_for(img, 1, i), img));
    auto path = std::filesystem::temp_directory_path() / "augsel-members.csv";
    save_member_csv(path, families);
    MemberTable table = load_member_csv(path, 25, 3);
    CHECK(table.member_count == 2);
    for (int i = 0; i < 3; ++i) {
      const auto& fam = table.family(i);
      REQUIRE(fam.size() == 2);
      for (int j = 0; j < 2; ++j)
        CHECK(fam[static_cast<std::size_t>(j)] ==
              families[static_cast<std::size_t>(i)].members[static_cast<std::size_t>(j)].features);
    }
    CHECK_THROWS_AS(table.family(3), Error);
    CHECK_THROWS_AS(load_member_csv(path, 25, 4), Error);  // origin 3 missing
  }
}
