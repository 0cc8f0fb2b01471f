#include "newsseg/shotdetect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "newsseg/error.hpp"

namespace newsseg {

namespace {

// RGB -> HSV with all channels on a [0,255] scale (hue included).
inline void rgb_to_hsv(uint8_t r8, uint8_t g8, uint8_t b8, float& h, float& s,
                       float& v) {
  double r = r8;
  double g = g8;
  double b = b8;
  double maxc = std::max({r, g, b});
  double minc = std::min({r, g, b});
  double chroma = maxc - minc;
  v = static_cast<float>(maxc);
  s = maxc > 0.0 ? static_cast<float>(255.0 * chroma / maxc) : 0.0f;
  double hue_deg = 0.0;
  if (chroma > 0.0) {
    if (maxc == r) {
      hue_deg = 60.0 * std::fmod((g - b) / chroma + 6.0, 6.0);
    } else if (maxc == g) {
      hue_deg = 60.0 * ((b - r) / chroma + 2.0);
    } else {
      hue_deg = 60.0 * ((r - g) / chroma + 4.0);
    }
  }
  h = static_cast<float>(hue_deg * (255.0 / 360.0));
}

void hsv_planes(const Image& img, std::vector<float>& out) {
  out.resize(img.data.size());
  const size_t n = img.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    rgb_to_hsv(img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2],
               out[3 * i], out[3 * i + 1], out[3 * i + 2]);
  }
}

// Mean |delta| per channel over interleaved HSV buffers, channel-averaged.
double hsv_content_score(const std::vector<float>& a,
                         const std::vector<float>& b, size_t pixels) {
  double sum_h = 0.0;
  double sum_s = 0.0;
  double sum_v = 0.0;
  for (size_t i = 0; i < pixels; ++i) {
    sum_h += std::abs(static_cast<double>(a[3 * i]) - b[3 * i]);
    sum_s += std::abs(static_cast<double>(a[3 * i + 1]) - b[3 * i + 1]);
    sum_v += std::abs(static_cast<double>(a[3 * i + 2]) - b[3 * i + 2]);
  }
  double n = static_cast<double>(pixels);
  return (sum_h / n + sum_s / n + sum_v / n) / 3.0;
}

}  // namespace

std::vector<FrameSpan> ShotList::spans() const {
  std::vector<FrameSpan> out;
  int64_t start = 0;
  for (int64_t b : boundaries) {
    out.push_back(FrameSpan{start, b, SceneLabel::Advertisement});
    start = b;
  }
  if (frame_count > start) {
    out.push_back(FrameSpan{start, frame_count, SceneLabel::Advertisement});
  }
  return out;
}

FrameStats frame_stats(const Image& frame) {
  if (frame.width <= 0 || frame.height <= 0 || frame.data.empty()) {
    throw EmptyFrameError("frame_stats requires a non-empty frame");
  }
  std::vector<float> hsv;
  hsv_planes(frame, hsv);
  double sum_h = 0.0, sum_s = 0.0, sum_v = 0.0;
  size_t n = frame.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    sum_h += hsv[3 * i];
    sum_s += hsv[3 * i + 1];
    sum_v += hsv[3 * i + 2];
  }
  double dn = static_cast<double>(n);
  return FrameStats{sum_h / dn, sum_s / dn, sum_v / dn};
}

double content_score(const Image& prev, const Image& cur) {
  if (prev.width != cur.width || prev.height != cur.height) {
    throw DimensionMismatchError(
        "content_score requires equal frame dimensions");
  }
  if (prev.width <= 0 || prev.height <= 0) {
    throw EmptyFrameError("content_score requires non-empty frames");
  }
  std::vector<float> a, b;
  hsv_planes(prev, a);
  hsv_planes(cur, b);
  return hsv_content_score(a, b, prev.pixel_count());
}

Image FrameSource::frame_at(int64_t) {
  throw IoError("frame source does not support random access");
}

std::optional<Image> MemoryFrameSource::next() {
  if (pos_ >= frames_.size()) return std::nullopt;
  return frames_[pos_++];
}

Image MemoryFrameSource::frame_at(int64_t index) {
  if (index < 0 || static_cast<size_t>(index) >= frames_.size()) {
    throw IoError("frame index out of range: " + std::to_string(index));
  }
  return frames_[static_cast<size_t>(index)];
}

ShotDetector::ShotDetector(DetectorConfig config, double fps)
    : config_(config), fps_(fps) {
  if (config_.threshold <= 0.0) {
    throw SchemaError("detector threshold must be positive");
  }
  if (config_.min_shot_frames < 1) {
    throw SchemaError("min_shot_frames must be at least 1");
  }
}

void ShotDetector::push(const Image& frame) {
  if (frame.width <= 0 || frame.height <= 0) {
    throw EmptyFrameError("detector received an empty frame");
  }
  if (frames_seen_ == 0) {
    prev_width_ = frame.width;
    prev_height_ = frame.height;
  } else if (frame.width != prev_width_ || frame.height != prev_height_) {
    throw DimensionMismatchError("frame dimensions changed mid-stream");
  }
  std::vector<float> hsv;
  hsv_planes(frame, hsv);
  if (frames_seen_ > 0) {
    double score = hsv_content_score(prev_hsv_, hsv, frame.pixel_count());
    int64_t i = frames_seen_;
    if (score > config_.threshold &&
        i - last_boundary_ >= config_.min_shot_frames) {
      boundaries_.push_back(i);
      last_boundary_ = i;
    }
  }
  prev_hsv_ = std::move(hsv);
  ++frames_seen_;
}

ShotList ShotDetector::finish() {
  if (frames_seen_ == 0) {
    throw EmptyInputError("cannot detect shots in an empty stream");
  }
  ShotList shots;
  shots.fps = fps_;
  shots.frame_count = frames_seen_;
  shots.boundaries = boundaries_;
  return shots;
}

ShotList detect_shots(FrameSource& frames, const DetectorConfig& config,
                      double fps) {
  ShotDetector detector(config, fps);
  while (auto frame = frames.next()) {
    detector.push(*frame);
  }
  return detector.finish();
}

std::string shotlist_to_json(const ShotList& shots) {
  nlohmann::json j;
  j["fps"] = shots.fps;
  j["frame_count"] = shots.frame_count;
  j["boundaries"] = shots.boundaries;
  return j.dump(2) + "\n";
}

ShotList shotlist_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("shot list JSON parse failure: ") +
                      e.what());
  }
  if (!j.contains("fps") || !j.contains("frame_count") ||
      !j.contains("boundaries")) {
    throw SchemaError(
        "shot list JSON must contain fps, frame_count, and boundaries");
  }
  ShotList shots;
  shots.fps = j["fps"].get<double>();
  shots.frame_count = j["frame_count"].get<int64_t>();
  shots.boundaries = j["boundaries"].get<std::vector<int64_t>>();
  int64_t prev = 0;
  for (int64_t b : shots.boundaries) {
    if (b <= prev || b >= shots.frame_count) {
      throw SchemaError("shot boundaries must be ascending interior frames");
    }
    prev = b;
  }
  return shots;
}

}  // namespace newsseg
