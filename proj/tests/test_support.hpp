#pragma once

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "newsseg/image.hpp"
#include "newsseg/rng.hpp"
#include "newsseg/timeline.hpp"

namespace testsupport {

/// Random valid timeline: alternating gaps and labeled spans up to
/// max_frames total extent.
inline newsseg::Timeline random_timeline(newsseg::RngStream& rng,
                                         int64_t max_frames,
                                         double fps = 25.0) {
  std::vector<newsseg::FrameSpan> spans;
  int64_t cursor = static_cast<int64_t>(rng.uniform_int(20));
  while (cursor < max_frames) {
    int64_t len = 1 + static_cast<int64_t>(rng.uniform_int(200));
    len = std::min(len, max_frames - cursor);
    if (len <= 0) break;
    newsseg::SceneLabel label = newsseg::label_from_index(
        static_cast<int>(rng.uniform_int(newsseg::kNumLabels)));
    spans.push_back(newsseg::FrameSpan{cursor, cursor + len, label});
    cursor += len;
    if (rng.bernoulli(0.3)) {
      cursor += 1 + static_cast<int64_t>(rng.uniform_int(60));
    }
  }
  return newsseg::normalize_timeline(std::move(spans), fps);
}

/// -1 for unlabeled frames, else the label index.
inline std::vector<int8_t> label_array(const newsseg::Timeline& t,
                                       int64_t frames) {
  std::vector<int8_t> out(static_cast<size_t>(frames), int8_t{-1});
  for (const newsseg::FrameSpan& s : t.spans) {
    for (int64_t f = s.start_frame; f < s.end_frame && f < frames; ++f) {
      out[static_cast<size_t>(f)] =
          static_cast<int8_t>(newsseg::label_index(s.label));
    }
  }
  return out;
}

/// Brute-force per-frame confusion: compares labels at every integer frame.
inline newsseg::DurationConfusion per_frame_confusion_oracle(
    const newsseg::Timeline& pred, const newsseg::Timeline& ref) {
  newsseg::DurationConfusion cm;
  cm.fps = pred.fps;
  int64_t frames = std::max(pred.end_frame(), ref.end_frame());
  std::vector<int8_t> p = label_array(pred, frames);
  std::vector<int8_t> r = label_array(ref, frames);
  for (int64_t f = 0; f < frames; ++f) {
    int8_t a = p[static_cast<size_t>(f)];
    int8_t b = r[static_cast<size_t>(f)];
    if (a >= 0 && b >= 0) {
      cm.cells[static_cast<size_t>(a)][static_cast<size_t>(b)] += 1;
    }
  }
  return cm;
}

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto candidate =
          base / ("newsseg_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }

  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Solid-color frames for synthetic streams.
inline std::vector<newsseg::Image> color_block_stream(
    const std::vector<std::pair<int64_t, std::array<uint8_t, 3>>>& blocks,
    int width = 32, int height = 32) {
  std::vector<newsseg::Image> frames;
  for (const auto& [len, rgb] : blocks) {
    for (int64_t i = 0; i < len; ++i) {
      frames.push_back(
          newsseg::Image::solid(width, height, rgb[0], rgb[1], rgb[2]));
    }
  }
  return frames;
}

}  // namespace testsupport
