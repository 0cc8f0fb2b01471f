#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "newsseg/timeline.hpp"

namespace newsseg {

struct VideoRecord {
  std::string video_id;
  double fps = 25.0;
  int64_t frame_count = 0;
  int width = 0;
  int height = 0;
  int audio_sample_rate = 0;
  Timeline annotation;

  bool operator==(const VideoRecord&) const = default;
};

enum class SplitTag { Train, Val, Test };

std::string_view split_tag_name(SplitTag tag);

struct ClipRecord {
  std::string video_id;
  FrameSpan span;
  SplitTag split_tag = SplitTag::Train;
};

struct ClassDistribution {
  std::array<int64_t, kNumLabels> clip_count{};
  std::array<double, kNumLabels> mean_duration_s{};
  std::array<double, kNumLabels> total_duration_h{};

  int64_t total_clips() const;
};

/// Parses the normalized annotation schema
/// {"videos":[{"video_id","fps","frame_count","width","height",
///             "audio_sample_rate","regions":[...]}]}
/// applying normalize_timeline per video. Throws SchemaError,
/// UnknownLabelError, or OverlapError.
std::vector<VideoRecord> parse_annotations(const std::string& json_text);

/// Inverse of parse_annotations (parse/serialize round-trip is identity).
std::string annotations_to_json(const std::vector<VideoRecord>& records);

ClassDistribution class_distribution(const std::vector<VideoRecord>& records);

struct SplitAssignment {
  std::vector<std::pair<std::string, SplitTag>> videos;  // id -> bucket
  std::array<int64_t, 3> bucket_sizes{};

  std::vector<ClipRecord> clips(const std::vector<VideoRecord>& records) const;
};

/// Deterministic whole-video split. Bucket sizes come from largest-remainder
/// rounding of the ratios; assignment is a seeded shuffle. Throws
/// InsufficientVideosError when a nonzero-ratio bucket would stay empty.
SplitAssignment split_corpus(const std::vector<VideoRecord>& records,
                             const std::array<double, 3>& ratios,
                             uint64_t seed);

/// Inverse-frequency sampling weights: for the K labels with clips present,
/// weight[c] = total_clips / (K * clip_count[c]), so the expected label
/// frequency under weighted sampling is uniform and the mean per-clip
/// weight is 1. Absent labels get no weight (nullopt) and a warning.
std::array<std::optional<double>, kNumLabels> sample_weights(
    const ClassDistribution& distribution);

/// CSV for the stats subcommand: label,clips,avg_dur_s,total_dur_h.
std::string class_distribution_csv(const ClassDistribution& d);

}  // namespace newsseg
