#include "newsseg/image.hpp"

#include <algorithm>
#include <cmath>

#include "newsseg/error.hpp"

namespace newsseg {

Image Image::solid(int width, int height, uint8_t r, uint8_t g, uint8_t b) {
  Image img;
  img.width = width;
  img.height = height;
  img.data.resize(static_cast<size_t>(width) * height * 3);
  for (size_t i = 0; i < img.data.size(); i += 3) {
    img.data[i] = r;
    img.data[i + 1] = g;
    img.data[i + 2] = b;
  }
  return img;
}

Image resize_bilinear(const Image& src, int out_width, int out_height) {
  if (src.width <= 0 || src.height <= 0) {
    throw EmptyFrameError("cannot resize an empty image");
  }
  if (out_width <= 0 || out_height <= 0) {
    throw ShapeError("target size must be positive");
  }
  Image out;
  out.width = out_width;
  out.height = out_height;
  out.data.resize(static_cast<size_t>(out_width) * out_height * 3);

  // Pixel-center alignment: output center maps to input center.
  const double sx = static_cast<double>(src.width) / out_width;
  const double sy = static_cast<double>(src.height) / out_height;
  for (int oy = 0; oy < out_height; ++oy) {
    double fy = (oy + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y0c = std::clamp(y0, 0, src.height - 1);
    int y1c = std::clamp(y0 + 1, 0, src.height - 1);
    for (int ox = 0; ox < out_width; ++ox) {
      double fx = (ox + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x0c = std::clamp(x0, 0, src.width - 1);
      int x1c = std::clamp(x0 + 1, 0, src.width - 1);
      const uint8_t* p00 = src.pixel(x0c, y0c);
      const uint8_t* p10 = src.pixel(x1c, y0c);
      const uint8_t* p01 = src.pixel(x0c, y1c);
      const uint8_t* p11 = src.pixel(x1c, y1c);
      uint8_t* dst = out.pixel(ox, oy);
      for (int c = 0; c < 3; ++c) {
        double top = p00[c] * (1.0 - wx) + p10[c] * wx;
        double bot = p01[c] * (1.0 - wx) + p11[c] * wx;
        double v = top * (1.0 - wy) + bot * wy;
        dst[c] = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return out;
}

Image hflip(const Image& img) {
  Image out;
  out.width = img.width;
  out.height = img.height;
  out.data.resize(img.data.size());
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const uint8_t* s = img.pixel(img.width - 1 - x, y);
      uint8_t* d = out.pixel(x, y);
      d[0] = s[0];
      d[1] = s[1];
      d[2] = s[2];
    }
  }
  return out;
}

Image crop(const Image& src, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > src.width ||
      y0 + h > src.height) {
    throw ShapeError("crop rectangle outside image bounds");
  }
  Image out;
  out.width = w;
  out.height = h;
  out.data.resize(static_cast<size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    const uint8_t* s = src.pixel(x0, y0 + y);
    std::copy(s, s + static_cast<size_t>(w) * 3, out.pixel(0, y));
  }
  return out;
}

std::vector<float> image_to_float(const Image& img) {
  std::vector<float> out(img.data.size());
  for (size_t i = 0; i < img.data.size(); ++i) {
    out[i] = static_cast<float>(img.data[i]) * (1.0f / 255.0f);
  }
  return out;
}

}  // namespace newsseg
