#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "newsseg/labels.hpp"

namespace newsseg {

/// Half-open labeled frame interval [start_frame, end_frame).
struct FrameSpan {
  int64_t start_frame = 0;
  int64_t end_frame = 0;
  SceneLabel label = SceneLabel::Advertisement;

  int64_t length() const { return end_frame - start_frame; }
  bool operator==(const FrameSpan&) const = default;
};

/// Sorted, non-overlapping labeled spans in integer frame units. Gaps are
/// allowed; overlaps are not. fps is metadata used only when converting to
/// seconds for reports.
struct Timeline {
  double fps = 25.0;
  std::vector<FrameSpan> spans;

  bool operator==(const Timeline&) const = default;

  /// Total labeled frames per label index.
  std::array<int64_t, kNumLabels> label_frame_totals() const;

  /// Label at a frame, if any span covers it. Linear scan; use for tests
  /// and small lookups only.
  std::optional<SceneLabel> label_at(int64_t frame) const;

  /// End of the last span (0 when empty).
  int64_t end_frame() const {
    return spans.empty() ? 0 : spans.back().end_frame;
  }
};

/// 5x5 duration-weighted confusion matrix in exact frame counts.
/// Row = predicted label index, column = annotated label index.
struct DurationConfusion {
  double fps = 25.0;
  std::array<std::array<int64_t, kNumLabels>, kNumLabels> cells{};

  int64_t total_frames() const;
  int64_t diagonal_frames() const;
  int64_t row_sum(int row) const;
  int64_t col_sum(int col) const;

  DurationConfusion& operator+=(const DurationConfusion& other);
  bool operator==(const DurationConfusion&) const = default;
};

/// Metric values where a zero denominator yields the "undefined" sentinel
/// (std::nullopt) rather than NaN.
struct MetricsReport {
  std::array<std::optional<double>, kNumLabels> precision;
  std::array<std::optional<double>, kNumLabels> recall;
  std::optional<double> accuracy;
  double total_evaluated_s = 0.0;
};

/// Renders an optional metric; nullopt -> "undefined".
std::string metric_to_string(const std::optional<double>& v, int decimals = 4);

/// Sorts spans, drops zero-length ones, and rejects overlaps.
/// Throws OverlapError naming the two offending spans.
Timeline normalize_timeline(std::vector<FrameSpan> spans, double fps);

/// Merges consecutive spans that share a label and touch exactly
/// (a.end_frame == b.start_frame). Gaps never merge.
Timeline merge_adjacent(const Timeline& t);

/// cells[p][a] = frames where pred assigns p and ref assigns a. Frames
/// labeled in only one timeline are excluded. Throws FpsMismatchError.
DurationConfusion confusion_durations(const Timeline& pred,
                                      const Timeline& ref);

/// Frames covered by exactly one of the two timelines (the duration
/// excluded from the confusion matrix).
int64_t uncovered_overlap_frames(const Timeline& pred, const Timeline& ref);

MetricsReport metrics(const DurationConfusion& cm);

/// JSON round-trip per the documented schema
/// {"fps": number, "spans": [{"start_frame", "end_frame", "label"}]}.
std::string timeline_to_json(const Timeline& t);
Timeline timeline_from_json(const std::string& text);

}  // namespace newsseg
