#pragma once

#include <cstdint>
#include <vector>

#include "augsel/common.hpp"

namespace augsel {

// Raster image, row-major, channel-interleaved, 8-bit intensities.
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 or 3
  std::vector<std::uint8_t> pixels;

  static RawImage zeros(int width, int height, int channels = 1);

  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  bool same_shape(const RawImage& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
  void validate() const;
  long total_intensity() const;
};

// Content shifted by (dx, dy): +dx moves content toward larger x (right),
// +dy toward larger y (down). Vacated pixels are zero-filled.
RawImage translate(const RawImage& img, int dx, int dy);

// Rotation about the image center by `degrees` (counterclockwise positive),
// inverse-mapped with bilinear interpolation; out-of-bounds sources read 0.
// An angle of exactly 0 returns the input unchanged.
RawImage rotate(const RawImage& img, double degrees);

// Drops a `border`-pixel frame on all sides and rescales the central region
// back to the original size with bilinear interpolation (samples clamped to
// the cropped region).
RawImage crop_zoom(const RawImage& img, int border);

// Pixels flattened row-major (channel-interleaved) and scaled to [0, 1].
std::vector<double> flatten_scaled(const RawImage& img);

}  // namespace augsel
