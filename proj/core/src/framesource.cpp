#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "newsseg/error.hpp"
#include "newsseg/shotdetect.hpp"

namespace newsseg {

namespace {

namespace fs = std::filesystem;

class RawRgbFileSource : public FrameSource {
 public:
  RawRgbFileSource(const std::string& path, int width, int height)
      : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw SchemaError("raw frame sources need positive --width/--height");
    }
    if (path == "-") {
      file_ = stdin;
    } else {
      file_ = std::fopen(path.c_str(), "rb");
      owns_file_ = true;
      seekable_ = true;
      path_ = path;
    }
    if (file_ == nullptr) {
      throw IoError("cannot open frame file: " + path);
    }
  }

  ~RawRgbFileSource() override {
    if (owns_file_ && file_ != nullptr) std::fclose(file_);
  }

  std::optional<Image> next() override {
    Image img;
    img.width = width_;
    img.height = height_;
    img.data.resize(frame_bytes());
    size_t got = std::fread(img.data.data(), 1, img.data.size(), file_);
    if (got == 0) return std::nullopt;
    if (got != img.data.size()) {
      throw IoError("truncated frame in raw stream (" + std::to_string(got) +
                    " of " + std::to_string(img.data.size()) + " bytes)");
    }
    return img;
  }

  bool seekable() const override { return seekable_; }

  void reset() override {
    if (!seekable_) {
      throw IoError("cannot rewind a non-seekable frame stream (stdin)");
    }
    std::fseek(file_, 0, SEEK_SET);
  }

  Image frame_at(int64_t index) override {
    if (!seekable_) {
      throw IoError("random frame access requires a seekable source");
    }
    if (std::fseek(file_, static_cast<long>(index * frame_bytes()), SEEK_SET) !=
        0) {
      throw IoError("seek failed in " + path_);
    }
    auto img = next();
    if (!img) {
      throw IoError("frame " + std::to_string(index) + " past end of " +
                    path_);
    }
    return *img;
  }

 private:
  size_t frame_bytes() const {
    return static_cast<size_t>(width_) * height_ * 3;
  }

  int width_;
  int height_;
  FILE* file_ = nullptr;
  bool owns_file_ = false;
  bool seekable_ = false;
  std::string path_;
};

Image read_png(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (fp == nullptr) throw IoError("cannot open PNG: " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    if (png != nullptr) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw CorruptFileError("failed to decode PNG: " + path);
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  // Normalize everything to 8-bit RGB.
  png_byte color_type = png_get_color_type(png, info);
  png_byte bit_depth = png_get_bit_depth(png, info);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  if (color_type == PNG_COLOR_TYPE_RGB_ALPHA ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA ||
      png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);

  Image img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.data.resize(static_cast<size_t>(img.width) * img.height * 3);
  std::vector<png_bytep> rows(static_cast<size_t>(img.height));
  for (int y = 0; y < img.height; ++y) {
    rows[static_cast<size_t>(y)] = img.data.data() +
                                   static_cast<size_t>(y) * img.width * 3;
  }
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  return img;
}

// Sort key: the last run of digits in the stem (frame_0007.png -> 7).
int64_t numeric_key(const fs::path& p) {
  std::string stem = p.stem().string();
  int64_t value = -1;
  size_t i = stem.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(stem[i - 1]))) --i;
  if (i < stem.size()) {
    value = std::stoll(stem.substr(i));
  }
  return value;
}

class PngDirSource : public FrameSource {
 public:
  explicit PngDirSource(const std::string& dir) {
    if (!fs::is_directory(dir)) {
      throw IoError("not a directory: " + dir);
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".png") {
        paths_.push_back(entry.path());
      }
    }
    if (paths_.empty()) {
      throw IoError("no .png frames in directory: " + dir);
    }
    std::sort(paths_.begin(), paths_.end(),
              [](const fs::path& a, const fs::path& b) {
                int64_t ka = numeric_key(a);
                int64_t kb = numeric_key(b);
                if (ka != kb) return ka < kb;
                return a.filename() < b.filename();
              });
  }

  std::optional<Image> next() override {
    if (pos_ >= paths_.size()) return std::nullopt;
    return read_png(paths_[pos_++].string());
  }

  bool seekable() const override { return true; }
  void reset() override { pos_ = 0; }

  Image frame_at(int64_t index) override {
    if (index < 0 || static_cast<size_t>(index) >= paths_.size()) {
      throw IoError("frame index out of range: " + std::to_string(index));
    }
    return read_png(paths_[static_cast<size_t>(index)].string());
  }

 private:
  std::vector<fs::path> paths_;
  size_t pos_ = 0;
};

}  // namespace

std::unique_ptr<FrameSource> open_raw_rgb_source(const std::string& path,
                                                 int width, int height) {
  return std::make_unique<RawRgbFileSource>(path, width, height);
}

std::unique_ptr<FrameSource> open_png_dir_source(const std::string& dir) {
  return std::make_unique<PngDirSource>(dir);
}

std::unique_ptr<FrameSource> open_frame_source(const std::string& path,
                                               int width, int height) {
  if (path != "-" && fs::is_directory(path)) {
    return open_png_dir_source(path);
  }
  return open_raw_rgb_source(path, width, height);
}

}  // namespace newsseg
