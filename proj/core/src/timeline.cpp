#include "newsseg/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "newsseg/error.hpp"

namespace newsseg {

namespace {

std::string span_str(const FrameSpan& s) {
  std::ostringstream os;
  os << "[" << s.start_frame << "," << s.end_frame << ","
     << label_name(s.label) << ")";
  return os.str();
}

void require_positive_fps(double fps) {
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw SchemaError("fps must be a positive finite number, got " +
                      std::to_string(fps));
  }
}

}  // namespace

std::array<int64_t, kNumLabels> Timeline::label_frame_totals() const {
  std::array<int64_t, kNumLabels> totals{};
  for (const FrameSpan& s : spans) {
    totals[static_cast<size_t>(label_index(s.label))] += s.length();
  }
  return totals;
}

std::optional<SceneLabel> Timeline::label_at(int64_t frame) const {
  for (const FrameSpan& s : spans) {
    if (frame < s.start_frame) break;
    if (frame < s.end_frame) return s.label;
  }
  return std::nullopt;
}

int64_t DurationConfusion::total_frames() const {
  int64_t total = 0;
  for (const auto& row : cells) {
    for (int64_t cell : row) total += cell;
  }
  return total;
}

int64_t DurationConfusion::diagonal_frames() const {
  int64_t total = 0;
  for (int i = 0; i < kNumLabels; ++i) total += cells[i][i];
  return total;
}

int64_t DurationConfusion::row_sum(int row) const {
  int64_t total = 0;
  for (int64_t cell : cells[static_cast<size_t>(row)]) total += cell;
  return total;
}

int64_t DurationConfusion::col_sum(int col) const {
  int64_t total = 0;
  for (const auto& row : cells) total += row[static_cast<size_t>(col)];
  return total;
}

DurationConfusion& DurationConfusion::operator+=(
    const DurationConfusion& other) {
  if (fps != other.fps) {
    throw FpsMismatchError("cannot pool confusion matrices with fps " +
                           std::to_string(fps) + " and " +
                           std::to_string(other.fps));
  }
  for (int p = 0; p < kNumLabels; ++p) {
    for (int a = 0; a < kNumLabels; ++a) {
      cells[p][a] += other.cells[p][a];
    }
  }
  return *this;
}

std::string metric_to_string(const std::optional<double>& v, int decimals) {
  if (!v.has_value()) return "undefined";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << *v;
  return os.str();
}

Timeline normalize_timeline(std::vector<FrameSpan> spans, double fps) {
  require_positive_fps(fps);
  std::erase_if(spans, [](const FrameSpan& s) {
    return s.start_frame == s.end_frame;
  });
  for (const FrameSpan& s : spans) {
    if (s.start_frame < 0 || s.end_frame < s.start_frame) {
      throw SchemaError("invalid span " + span_str(s));
    }
  }
  std::stable_sort(spans.begin(), spans.end(),
                   [](const FrameSpan& a, const FrameSpan& b) {
                     return a.start_frame < b.start_frame;
                   });
  for (size_t i = 1; i < spans.size(); ++i) {
    if (spans[i - 1].end_frame > spans[i].start_frame) {
      throw OverlapError("spans overlap: " + span_str(spans[i - 1]) + " and " +
                         span_str(spans[i]));
    }
  }
  return Timeline{fps, std::move(spans)};
}

Timeline merge_adjacent(const Timeline& t) {
  Timeline out;
  out.fps = t.fps;
  out.spans.reserve(t.spans.size());
  for (const FrameSpan& s : t.spans) {
    if (!out.spans.empty() && out.spans.back().label == s.label &&
        out.spans.back().end_frame == s.start_frame) {
      out.spans.back().end_frame = s.end_frame;
    } else {
      out.spans.push_back(s);
    }
  }
  return out;
}

DurationConfusion confusion_durations(const Timeline& pred,
                                      const Timeline& ref) {
  if (pred.fps != ref.fps) {
    throw FpsMismatchError("timeline fps mismatch: predicted " +
                           std::to_string(pred.fps) + " vs annotated " +
                           std::to_string(ref.fps));
  }
  DurationConfusion cm;
  cm.fps = pred.fps;
  // Two-pointer sweep over both sorted span lists.
  size_t i = 0;
  size_t j = 0;
  while (i < pred.spans.size() && j < ref.spans.size()) {
    const FrameSpan& p = pred.spans[i];
    const FrameSpan& r = ref.spans[j];
    int64_t lo = std::max(p.start_frame, r.start_frame);
    int64_t hi = std::min(p.end_frame, r.end_frame);
    if (lo < hi) {
      cm.cells[static_cast<size_t>(label_index(p.label))]
              [static_cast<size_t>(label_index(r.label))] += hi - lo;
    }
    if (p.end_frame <= r.end_frame) {
      ++i;
    } else {
      ++j;
    }
  }
  return cm;
}

int64_t uncovered_overlap_frames(const Timeline& pred, const Timeline& ref) {
  int64_t pred_total = 0;
  for (const FrameSpan& s : pred.spans) pred_total += s.length();
  int64_t ref_total = 0;
  for (const FrameSpan& s : ref.spans) ref_total += s.length();
  int64_t both = confusion_durations(pred, ref).total_frames();
  return pred_total + ref_total - 2 * both;
}

MetricsReport metrics(const DurationConfusion& cm) {
  MetricsReport report;
  for (int c = 0; c < kNumLabels; ++c) {
    int64_t rs = cm.row_sum(c);
    int64_t cs = cm.col_sum(c);
    int64_t diag = cm.cells[static_cast<size_t>(c)][static_cast<size_t>(c)];
    if (rs > 0) {
      report.precision[static_cast<size_t>(c)] =
          static_cast<double>(diag) / static_cast<double>(rs);
    }
    if (cs > 0) {
      report.recall[static_cast<size_t>(c)] =
          static_cast<double>(diag) / static_cast<double>(cs);
    }
  }
  int64_t total = cm.total_frames();
  if (total > 0) {
    report.accuracy = static_cast<double>(cm.diagonal_frames()) /
                      static_cast<double>(total);
  }
  report.total_evaluated_s = static_cast<double>(total) / cm.fps;
  return report;
}

std::string timeline_to_json(const Timeline& t) {
  nlohmann::json j;
  j["fps"] = t.fps;
  j["spans"] = nlohmann::json::array();
  for (const FrameSpan& s : t.spans) {
    j["spans"].push_back({{"start_frame", s.start_frame},
                          {"end_frame", s.end_frame},
                          {"label", std::string(label_name(s.label))}});
  }
  return j.dump(2) + "\n";
}

Timeline timeline_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("timeline JSON parse failure: ") + e.what());
  }
  if (!j.is_object() || !j.contains("fps") || !j.contains("spans")) {
    throw SchemaError("timeline JSON must contain \"fps\" and \"spans\"");
  }
  if (!j["fps"].is_number()) throw SchemaError("\"fps\" must be a number");
  if (!j["spans"].is_array()) throw SchemaError("\"spans\" must be an array");
  std::vector<FrameSpan> spans;
  for (const auto& e : j["spans"]) {
    if (!e.is_object() || !e.contains("start_frame") ||
        !e.contains("end_frame") || !e.contains("label")) {
      throw SchemaError(
          "span must contain start_frame, end_frame, and label: " + e.dump());
    }
    if (!e["start_frame"].is_number_integer() ||
        !e["end_frame"].is_number_integer()) {
      throw SchemaError("span frames must be integers: " + e.dump());
    }
    FrameSpan s;
    s.start_frame = e["start_frame"].get<int64_t>();
    s.end_frame = e["end_frame"].get<int64_t>();
    s.label = parse_label(e["label"].get<std::string>());
    if (s.end_frame < s.start_frame) {
      throw SchemaError("span ends before it starts: " + e.dump());
    }
    spans.push_back(s);
  }
  return normalize_timeline(std::move(spans), j["fps"].get<double>());
}

}  // namespace newsseg
