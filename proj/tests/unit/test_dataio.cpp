#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>

#include "augsel/dataset.hpp"
#include "augsel/idx.hpp"
#include "augsel/rng.hpp"

using namespace augsel;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "augsel-dataio-tests";
    fs::create_directories(d);
    return d;
  }();
  return dir / name;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void push_be32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(static_cast<std::uint8_t>(x >> 24));
  v.push_back(static_cast<std::uint8_t>(x >> 16));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
  v.push_back(static_cast<std::uint8_t>(x));
}

std::vector<std::uint8_t> idx_images(std::uint32_t count, std::uint32_t rows, std::uint32_t cols,
                                     std::uint8_t fill_base) {
  std::vector<std::uint8_t> v;
  push_be32(v, 0x00000803);
  push_be32(v, count);
  push_be32(v, rows);
  push_be32(v, cols);
  for (std::uint32_t i = 0; i < count * rows * cols; ++i)
    v.push_back(static_cast<std::uint8_t>(fill_base + i));
  return v;
}

std::vector<std::uint8_t> idx_labels(const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> v;
  push_be32(v, 0x00000801);
  push_be32(v, static_cast<std::uint32_t>(labels.size()));
  v.insert(v.end(), labels.begin(), labels.end());
  return v;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an augsel::Error");
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST_SUITE("dataio") {
  TEST_CASE("well-formed two-image idx pair loads both records") {
    auto imgs = temp_file("two.images");
    auto labs = temp_file("two.labels");
    write_bytes(imgs, idx_images(2, 28, 28, 0));
    write_bytes(labs, idx_labels({3, 8}));
    auto pairs = load_idx(imgs, labs);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].first.pixels.size() == 784);
    CHECK(pairs[1].first.pixels.size() == 784);
    CHECK(pairs[0].second == 3);
    CHECK(pairs[1].second == 8);
  }

  TEST_CASE("label file carrying the image magic is a format error") {
    auto imgs = temp_file("magic.images");
    auto labs = temp_file("magic.labels");
    write_bytes(imgs, idx_images(1, 2, 2, 0));
    write_bytes(labs, idx_images(1, 1, 1, 0));  // image magic where labels belong
    CHECK(kind_of([&] { load_idx(imgs, labs); }) == ErrorKind::format);
  }

  TEST_CASE("truncated image payload is detected") {
    auto imgs = temp_file("trunc.images");
    auto labs = temp_file("trunc.labels");
    auto bytes = idx_images(2, 4, 4, 0);
    bytes.resize(bytes.size() - 5);
    write_bytes(imgs, bytes);
    write_bytes(labs, idx_labels({1, 2}));
    CHECK(kind_of([&] { load_idx(imgs, labs); }) == ErrorKind::size);
  }

  TEST_CASE("image/label count mismatch is a pairing error") {
    auto imgs = temp_file("mismatch.images");
    auto labs = temp_file("mismatch.labels");
    write_bytes(imgs, idx_images(2, 2, 2, 0));
    write_bytes(labs, idx_labels({1, 2, 3}));
    CHECK(kind_of([&] { load_idx(imgs, labs); }) == ErrorKind::data);
  }

  TEST_CASE("hand-built three-image file keeps file order") {
    auto imgs = temp_file("three.images");
    auto labs = temp_file("three.labels");
    write_bytes(imgs, idx_images(3, 2, 2, 10));
    write_bytes(labs, idx_labels({3, 8, 3}));
    auto pairs = load_idx(imgs, labs);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].second == 3);
    CHECK(pairs[1].second == 8);
    CHECK(pairs[2].second == 3);
    // first pixel of record i is 10 + 4*i by construction
    for (int i = 0; i < 3; ++i)
      CHECK(pairs[static_cast<std::size_t>(i)].first.pixels[0] == 10 + 4 * i);
  }

  TEST_CASE("idx writer round-trips through the loader") {
    std::vector<RawImage> images;
    std::vector<int> labels;
    auto eng = rng::make_engine(3);
    for (int i = 0; i < 5; ++i) {
      RawImage img = RawImage::zeros(3, 4, 1);
      for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng::below(eng, 256));
      images.push_back(std::move(img));
      labels.push_back(i % 2 ? 8 : 3);
    }
    auto imgs = temp_file("written.images");
    auto labs = temp_file("written.labels");
    write_idx_images(imgs, images);
    write_idx_labels(labs, labels);
    auto pairs = load_idx(imgs, labs);
    REQUIRE(pairs.size() == 5);
    for (int i = 0; i < 5; ++i) {
      CHECK(pairs[static_cast<std::size_t>(i)].first.pixels ==
            images[static_cast<std::size_t>(i)].pixels);
      CHECK(pairs[static_cast<std::size_t>(i)].second == labels[static_cast<std::size_t>(i)]);
    }
  }

  TEST_CASE("feature csv maps 0/1 labels onto -1/+1") {
    auto path = temp_file("two_rows.csv");
    std::ofstream(path) << "1,0.5,0.5\n0,-0.5,0.5\n";
    Dataset data = load_feature_csv(path);
    REQUIRE(data.size() == 2);
    CHECK(data.feature_dim == 2);
    CHECK(data.examples[0].label == 1);
    CHECK(data.examples[1].label == -1);
    CHECK(data.examples[0].weight == 1.0);
    CHECK(data.examples[1].origin_id == 1);
  }

  TEST_CASE("empty feature csv is a format error") {
    auto path = temp_file("empty.csv");
    std::ofstream(path) << "";
    CHECK(kind_of([&] { load_feature_csv(path); }) == ErrorKind::format);
  }

  TEST_CASE("unit weights sum to the row count") {
    auto path = temp_file("thousand.csv");
    {
      std::ofstream out(path);
      for (int i = 0; i < 1000; ++i) out << (i % 2) << ',' << i * 0.25 << '\n';
    }
    Dataset data = load_feature_csv(path);
    CHECK(data.size() == 1000);
    CHECK(data.total_weight() == 1000.0);
  }

  TEST_CASE("ragged, non-numeric and out-of-range label rows are rejected") {
    auto ragged = temp_file("ragged.csv");
    std::ofstream(ragged) << "1,0.5,0.5\n0,-0.5\n";
    CHECK(kind_of([&] { load_feature_csv(ragged); }) == ErrorKind::format);

    auto alpha = temp_file("alpha.csv");
    std::ofstream(alpha) << "1,0.5,zebra\n";
    CHECK(kind_of([&] { load_feature_csv(alpha); }) == ErrorKind::parse);

    auto badlabel = temp_file("badlabel.csv");
    std::ofstream(badlabel) << "2,0.5,0.5\n";
    CHECK(kind_of([&] { load_feature_csv(badlabel); }) == ErrorKind::label);
  }

  TEST_CASE("csv round-trip reproduces every value bit for bit") {
    auto eng = rng::make_engine(42);
    Dataset data;
    data.feature_dim = 5;
    for (int i = 0; i < 40; ++i) {
      LabeledExample ex;
      ex.features.resize(5);
      for (int j = 0; j < 5; ++j)
        ex.features[j] = rng::normal(eng) * std::pow(10.0, static_cast<int>(rng::below(eng, 7)) - 3);
      ex.label = rng::uniform01(eng) < 0.5 ? 1 : -1;
      ex.origin_id = i;
      data.push_back(std::move(ex));
    }
    auto path = temp_file("roundtrip.csv");
    save_feature_csv(data, path);
    Dataset back = load_feature_csv(path);
    REQUIRE(back.size() == data.size());
    CHECK(back.feature_dim == data.feature_dim);
    for (int i = 0; i < data.size(); ++i) {
      const auto& a = data.examples[static_cast<std::size_t>(i)];
      const auto& b = back.examples[static_cast<std::size_t>(i)];
      CHECK(a.label == b.label);
      CHECK(b.weight == 1.0);
      CHECK(b.origin_id == i);
      for (int j = 0; j < 5; ++j) CHECK(a.features[j] == b.features[j]);
    }
  }

  TEST_CASE("binary task sampling is seed-deterministic and scales pixels") {
    std::vector<std::pair<RawImage, int>> pairs;
    auto eng = rng::make_engine(7);
    for (int i = 0; i < 60; ++i) {
      RawImage img = RawImage::zeros(4, 4, 1);
      for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng::below(eng, 256));
      pairs.emplace_back(std::move(img), i % 3 == 0 ? 5 : (i % 2 ? 3 : 8));
    }
    BinaryTask a = make_binary_task(pairs, 3, 8, 20, 99);
    BinaryTask b = make_binary_task(pairs, 3, 8, 20, 99);
    BinaryTask c = make_binary_task(pairs, 3, 8, 20, 100);
    REQUIRE(a.data.size() == 20);
    CHECK(a.n_positive + a.n_negative == 20);
    bool identical = true;
    bool differs_from_c = false;
    for (int i = 0; i < 20; ++i) {
      identical = identical && a.data.examples[static_cast<std::size_t>(i)].features ==
                                   b.data.examples[static_cast<std::size_t>(i)].features;
      differs_from_c = differs_from_c || a.data.examples[static_cast<std::size_t>(i)].features !=
                                             c.data.examples[static_cast<std::size_t>(i)].features;
    }
    CHECK(identical);
    CHECK(differs_from_c);
    for (const auto& ex : a.data.examples) {
      CHECK(ex.features.minCoeff() >= 0.0);
      CHECK(ex.features.maxCoeff() <= 1.0);
    }
  }

  TEST_CASE("binary task rejects empty and oversized requests") {
    std::vector<std::pair<RawImage, int>> pairs;
    for (int i = 0; i < 10; ++i) pairs.emplace_back(RawImage::zeros(2, 2, 1), i % 2 ? 3 : 8);
    CHECK(kind_of([&] { make_binary_task(pairs, 3, 8, 0, 1); }) == ErrorKind::size);
    CHECK(kind_of([&] { make_binary_task(pairs, 3, 8, 11, 1); }) == ErrorKind::size);
    // exhaustive request returns everything regardless of seed
    BinaryTask all1 = make_binary_task(pairs, 3, 8, 10, 1);
    BinaryTask all2 = make_binary_task(pairs, 3, 8, 10, 2);
    CHECK(all1.data.size() == 10);
    CHECK(all2.data.size() == 10);
    CHECK(all1.n_positive == all2.n_positive);
  }

  TEST_CASE("validate_for_fit wants both classes with positive weight") {
    Dataset data;
    data.feature_dim = 1;
    LabeledExample pos;
    pos.features.resize(1);
    pos.features[0] = 1.0;
    pos.label = 1;
    data.push_back(pos);
    CHECK(kind_of([&] { data.validate_for_fit(); }) == ErrorKind::data);
    LabeledExample neg = pos;
    neg.label = -1;
    neg.weight = 0.0;
    data.push_back(neg);
    CHECK(kind_of([&] { data.validate_for_fit(); }) == ErrorKind::data);
    data.examples[1].weight = 0.5;
    CHECK_NOTHROW(data.validate_for_fit());
  }
}
