#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "newsseg/image.hpp"
#include "newsseg/timeline.hpp"

namespace newsseg {

struct DetectorConfig {
  double threshold = 27.0;      // content-score units
  int64_t min_shot_frames = 15;
};

/// Per-channel means of a frame in HSV space, hue scaled to [0,255].
struct FrameStats {
  double mean_h = 0.0;
  double mean_s = 0.0;
  double mean_v = 0.0;
};

/// Unlabeled tiling of [0, frame_count) into shots. boundaries holds the
/// interior cut frame indices, ascending.
struct ShotList {
  double fps = 25.0;
  int64_t frame_count = 0;
  std::vector<int64_t> boundaries;

  std::vector<FrameSpan> spans() const;  // labels defaulted; callers relabel
  size_t shot_count() const { return boundaries.size() + 1; }
};

FrameStats frame_stats(const Image& frame);

/// Mean absolute per-pixel HSV delta, averaged over the three channels.
/// Throws DimensionMismatchError when sizes differ.
double content_score(const Image& prev, const Image& cur);

/// Pull-based frame stream. Sources over files and PNG directories are
/// seekable; stdin is not.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::optional<Image> next() = 0;
  virtual bool seekable() const { return false; }
  virtual void reset() = 0;
  virtual Image frame_at(int64_t index);
};

std::unique_ptr<FrameSource> open_raw_rgb_source(const std::string& path,
                                                 int width, int height);
std::unique_ptr<FrameSource> open_png_dir_source(const std::string& dir);

/// Chooses raw-file vs PNG-directory based on the path ("-" = stdin).
/// width/height are required for raw sources and ignored for PNG dirs.
std::unique_ptr<FrameSource> open_frame_source(const std::string& path,
                                               int width, int height);

/// In-memory source for synthetic streams.
class MemoryFrameSource : public FrameSource {
 public:
  explicit MemoryFrameSource(std::vector<Image> frames)
      : frames_(std::move(frames)) {}
  std::optional<Image> next() override;
  bool seekable() const override { return true; }
  void reset() override { pos_ = 0; }
  Image frame_at(int64_t index) override;

 private:
  std::vector<Image> frames_;
  size_t pos_ = 0;
};

/// Streaming single-pass detector: one frame of look-back, O(1) memory in
/// video length. One instance per video.
class ShotDetector {
 public:
  explicit ShotDetector(DetectorConfig config, double fps);
  void push(const Image& frame);
  ShotList finish();

 private:
  DetectorConfig config_;
  double fps_;
  int64_t frames_seen_ = 0;
  int64_t last_boundary_ = 0;
  int prev_width_ = 0;
  int prev_height_ = 0;
  std::vector<float> prev_hsv_;  // interleaved H,S,V per pixel
  std::vector<int64_t> boundaries_;
};

/// Drains the source through a ShotDetector. Throws EmptyInputError for an
/// empty stream.
ShotList detect_shots(FrameSource& frames, const DetectorConfig& config,
                      double fps);

std::string shotlist_to_json(const ShotList& shots);
ShotList shotlist_from_json(const std::string& text);

}  // namespace newsseg
