#include "augsel/image.hpp"

#include <cmath>

namespace augsel {

RawImage RawImage::zeros(int width, int height, int channels) {
  require(width > 0 && height > 0, ErrorKind::invalid_argument, "image dimensions must be positive");
  require(channels == 1 || channels == 3, ErrorKind::invalid_argument, "channels must be 1 or 3");
  RawImage img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.pixels.assign(static_cast<std::size_t>(width) * height * channels, 0);
  return img;
}

void RawImage::validate() const {
  require(width > 0 && height > 0, ErrorKind::invalid_argument, "image dimensions must be positive");
  require(channels == 1 || channels == 3, ErrorKind::invalid_argument, "channels must be 1 or 3");
  require(pixels.size() == static_cast<std::size_t>(width) * height * channels,
          ErrorKind::invalid_argument, "pixel buffer length does not match dimensions");
}

long RawImage::total_intensity() const {
  long sum = 0;
  for (std::uint8_t p : pixels) sum += p;
  return sum;
}

RawImage translate(const RawImage& img, int dx, int dy) {
  img.validate();
  require(std::abs(dx) < img.width && std::abs(dy) < img.height, ErrorKind::invalid_argument,
          "translate offset must be smaller than the image dimensions");
  RawImage out = RawImage::zeros(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    int sy = y - dy;
    if (sy < 0 || sy >= img.height) continue;
    for (int x = 0; x < img.width; ++x) {
      int sx = x - dx;
      if (sx < 0 || sx >= img.width) continue;
      for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = img.at(sx, sy, c);
    }
  }
  return out;
}

namespace {

// Bilinear sample with zero fill outside the image.
double sample_zero(const RawImage& img, double fx, double fy, int c) {
  int x0 = static_cast<int>(std::floor(fx));
  int y0 = static_cast<int>(std::floor(fy));
  double ax = fx - x0;
  double ay = fy - y0;
  double acc = 0.0;
  for (int j = 0; j < 2; ++j) {
    int y = y0 + j;
    if (y < 0 || y >= img.height) continue;
    double wy = j ? ay : 1.0 - ay;
    for (int i = 0; i < 2; ++i) {
      int x = x0 + i;
      if (x < 0 || x >= img.width) continue;
      double wx = i ? ax : 1.0 - ax;
      acc += wx * wy * img.at(x, y, c);
    }
  }
  return acc;
}

std::uint8_t quantize(double v) {
  long q = std::lround(v);
  if (q < 0) q = 0;
  if (q > 255) q = 255;
  return static_cast<std::uint8_t>(q);
}

}  // namespace

RawImage rotate(const RawImage& img, double degrees) {
  img.validate();
  require(std::isfinite(degrees), ErrorKind::invalid_argument, "rotation angle must be finite");
  if (degrees == 0.0) return img;
  const double rad = degrees * 3.14159265358979323846 / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
  RawImage out = RawImage::zeros(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double sx = cx + c * (x - cx) + s * (y - cy);
      double sy = cy - s * (x - cx) + c * (y - cy);
      for (int ch = 0; ch < img.channels; ++ch)
        out.at(x, y, ch) = quantize(sample_zero(img, sx, sy, ch));
    }
  }
  return out;
}

RawImage crop_zoom(const RawImage& img, int border) {
  img.validate();
  require(border >= 1, ErrorKind::invalid_argument, "crop border must be at least 1");
  require(2 * border < std::min(img.width, img.height), ErrorKind::invalid_argument,
          "crop border too large for image");
  const int cw = img.width - 2 * border;
  const int ch = img.height - 2 * border;
  const double sx_scale = static_cast<double>(cw) / img.width;
  const double sy_scale = static_cast<double>(ch) / img.height;
  RawImage out = RawImage::zeros(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    // half-pixel-center mapping into the cropped region, clamped at its edges
    double fy = border + (y + 0.5) * sy_scale - 0.5;
    fy = std::min(std::max(fy, static_cast<double>(border)), static_cast<double>(border + ch - 1));
    for (int x = 0; x < img.width; ++x) {
      double fx = border + (x + 0.5) * sx_scale - 0.5;
      fx = std::min(std::max(fx, static_cast<double>(border)), static_cast<double>(border + cw - 1));
      for (int cc = 0; cc < img.channels; ++cc)
        out.at(x, y, cc) = quantize(sample_zero(img, fx, fy, cc));
    }
  }
  return out;
}

std::vector<double> flatten_scaled(const RawImage& img) {
  img.validate();
  std::vector<double> v(img.pixels.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = img.pixels[i] / 255.0;
  return v;
}

}  // namespace augsel
