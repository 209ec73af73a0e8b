#include "augsel/idx.hpp"

#include <cstdint>
#include <fstream>

namespace augsel {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  require(static_cast<bool>(in), ErrorKind::size, "truncated IDX file while reading " + what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<char*>(b), 4);
}

}  // namespace

std::vector<std::pair<RawImage, int>> load_idx(const std::filesystem::path& images_path,
                                               const std::filesystem::path& labels_path) {
  std::ifstream imgs(images_path, std::ios::binary);
  require(static_cast<bool>(imgs), ErrorKind::io, "cannot open image file: " + images_path.string());
  std::ifstream labs(labels_path, std::ios::binary);
  require(static_cast<bool>(labs), ErrorKind::io, "cannot open label file: " + labels_path.string());

  require(read_be32(imgs, "image magic") == kImagesMagic, ErrorKind::format,
          "bad magic in image file: " + images_path.string());
  const std::uint32_t n_images = read_be32(imgs, "image count");
  const std::uint32_t rows = read_be32(imgs, "row count");
  const std::uint32_t cols = read_be32(imgs, "column count");
  require(rows > 0 && cols > 0, ErrorKind::format, "IDX image dimensions must be positive");

  require(read_be32(labs, "label magic") == kLabelsMagic, ErrorKind::format,
          "bad magic in label file: " + labels_path.string());
  const std::uint32_t n_labels = read_be32(labs, "label count");
  require(n_images == n_labels, ErrorKind::data,
          "image/label count mismatch: " + std::to_string(n_images) + " images vs " +
              std::to_string(n_labels) + " labels");

  std::vector<std::pair<RawImage, int>> out;
  out.reserve(n_images);
  const std::size_t npix = static_cast<std::size_t>(rows) * cols;
  for (std::uint32_t i = 0; i < n_images; ++i) {
    RawImage img;
    img.width = static_cast<int>(cols);
    img.height = static_cast<int>(rows);
    img.channels = 1;
    img.pixels.resize(npix);
    imgs.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(npix));
    require(static_cast<bool>(imgs), ErrorKind::size,
            "truncated image payload in " + images_path.string());
    unsigned char lab;
    labs.read(reinterpret_cast<char*>(&lab), 1);
    require(static_cast<bool>(labs), ErrorKind::size,
            "truncated label payload in " + labels_path.string());
    out.emplace_back(std::move(img), static_cast<int>(lab));
  }
  return out;
}

void write_idx_images(const std::filesystem::path& path, const std::vector<RawImage>& images) {
  require(!images.empty(), ErrorKind::invalid_argument, "no images to write");
  const RawImage& first = images.front();
  require(first.channels == 1, ErrorKind::invalid_argument, "IDX writer supports 1 channel only");
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open for writing: " + path.string());
  write_be32(out, kImagesMagic);
  write_be32(out, static_cast<std::uint32_t>(images.size()));
  write_be32(out, static_cast<std::uint32_t>(first.height));
  write_be32(out, static_cast<std::uint32_t>(first.width));
  for (const RawImage& img : images) {
    require(img.same_shape(first), ErrorKind::invalid_argument, "images differ in shape");
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
  }
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  require(!labels.empty(), ErrorKind::invalid_argument, "no labels to write");
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open for writing: " + path.string());
  write_be32(out, kLabelsMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  for (int lab : labels) {
    require(lab >= 0 && lab <= 255, ErrorKind::invalid_argument, "label out of byte range");
    unsigned char b = static_cast<unsigned char>(lab);
    out.write(reinterpret_cast<char*>(&b), 1);
  }
  require(static_cast<bool>(out), ErrorKind::io, "write failed: " + path.string());
}

}  // namespace augsel
