#pragma once

#include <cstdint>
#include <vector>

namespace newsseg {

/// Interleaved 8-bit RGB raster, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;  // size == width * height * 3

  static Image solid(int width, int height, uint8_t r, uint8_t g, uint8_t b);

  size_t pixel_count() const {
    return static_cast<size_t>(width) * static_cast<size_t>(height);
  }
  const uint8_t* pixel(int x, int y) const {
    return data.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
  uint8_t* pixel(int x, int y) {
    return data.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
  bool operator==(const Image&) const = default;
};

/// Bilinear resample to the target size (rounded to nearest 8-bit value).
Image resize_bilinear(const Image& src, int out_width, int out_height);

/// Mirror around the vertical axis. Applying it twice is the identity.
Image hflip(const Image& img);

/// Axis-aligned crop; the rectangle must lie inside the image.
Image crop(const Image& src, int x0, int y0, int w, int h);

/// Scales 8-bit channels to floats in [0, 1], interleaved RGB layout kept.
std::vector<float> image_to_float(const Image& img);

}  // namespace newsseg
