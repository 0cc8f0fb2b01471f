#include "newsseg/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "newsseg/error.hpp"
#include "newsseg/log.hpp"
#include "newsseg/rng.hpp"

namespace newsseg {

namespace {

using nlohmann::json;

const json& require_field(const json& obj, const char* key,
                          const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SchemaError("missing field \"" + std::string(key) + "\" in " +
                      context);
  }
  return obj.at(key);
}

int64_t require_int(const json& obj, const char* key,
                    const std::string& context) {
  const json& v = require_field(obj, key, context);
  if (!v.is_number_integer()) {
    throw SchemaError("field \"" + std::string(key) + "\" in " + context +
                      " must be an integer");
  }
  return v.get<int64_t>();
}

double require_number(const json& obj, const char* key,
                      const std::string& context) {
  const json& v = require_field(obj, key, context);
  if (!v.is_number()) {
    throw SchemaError("field \"" + std::string(key) + "\" in " + context +
                      " must be a number");
  }
  return v.get<double>();
}

}  // namespace

std::string_view split_tag_name(SplitTag tag) {
  switch (tag) {
    case SplitTag::Train: return "train";
    case SplitTag::Val: return "val";
    case SplitTag::Test: return "test";
  }
  return "?";
}

int64_t ClassDistribution::total_clips() const {
  return std::accumulate(clip_count.begin(), clip_count.end(), int64_t{0});
}

std::vector<VideoRecord> parse_annotations(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("annotation JSON parse failure: ") +
                      e.what());
  }
  const json& videos = require_field(doc, "videos", "annotation document");
  if (!videos.is_array()) {
    throw SchemaError("\"videos\" must be an array");
  }
  std::vector<VideoRecord> records;
  records.reserve(videos.size());
  for (const json& v : videos) {
    VideoRecord rec;
    rec.video_id =
        require_field(v, "video_id", "video entry").get<std::string>();
    const std::string ctx = "video \"" + rec.video_id + "\"";
    rec.fps = require_number(v, "fps", ctx);
    rec.frame_count = require_int(v, "frame_count", ctx);
    rec.width = static_cast<int>(require_int(v, "width", ctx));
    rec.height = static_cast<int>(require_int(v, "height", ctx));
    rec.audio_sample_rate =
        static_cast<int>(require_int(v, "audio_sample_rate", ctx));
    if (rec.fps <= 0.0) throw SchemaError(ctx + ": fps must be positive");
    if (rec.frame_count <= 0) {
      throw SchemaError(ctx + ": frame_count must be positive");
    }
    if (rec.width <= 0 || rec.height <= 0) {
      throw SchemaError(ctx + ": width/height must be positive");
    }
    if (rec.audio_sample_rate <= 0) {
      throw SchemaError(ctx + ": audio_sample_rate must be positive");
    }
    const json& regions = require_field(v, "regions", ctx);
    if (!regions.is_array()) {
      throw SchemaError(ctx + ": \"regions\" must be an array");
    }
    std::vector<FrameSpan> spans;
    spans.reserve(regions.size());
    for (const json& r : regions) {
      FrameSpan s;
      s.start_frame = require_int(r, "start_frame", ctx + " region");
      s.end_frame = require_int(r, "end_frame", ctx + " region");
      s.label = parse_label(
          require_field(r, "label", ctx + " region").get<std::string>());
      if (s.end_frame < s.start_frame) {
        throw SchemaError(ctx + ": region ends before it starts (" +
                          std::to_string(s.start_frame) + " > " +
                          std::to_string(s.end_frame) + ")");
      }
      if (s.start_frame < 0 || s.end_frame > rec.frame_count) {
        throw SchemaError(ctx + ": region [" + std::to_string(s.start_frame) +
                          "," + std::to_string(s.end_frame) +
                          ") outside [0," + std::to_string(rec.frame_count) +
                          ")");
      }
      spans.push_back(s);
    }
    rec.annotation = normalize_timeline(std::move(spans), rec.fps);
    records.push_back(std::move(rec));
  }
  return records;
}

std::string annotations_to_json(const std::vector<VideoRecord>& records) {
  json doc;
  doc["videos"] = json::array();
  for (const VideoRecord& rec : records) {
    json v;
    v["video_id"] = rec.video_id;
    v["fps"] = rec.fps;
    v["frame_count"] = rec.frame_count;
    v["width"] = rec.width;
    v["height"] = rec.height;
    v["audio_sample_rate"] = rec.audio_sample_rate;
    v["regions"] = json::array();
    for (const FrameSpan& s : rec.annotation.spans) {
      v["regions"].push_back({{"start_frame", s.start_frame},
                              {"end_frame", s.end_frame},
                              {"label", std::string(label_name(s.label))}});
    }
    doc["videos"].push_back(std::move(v));
  }
  return doc.dump(2) + "\n";
}

ClassDistribution class_distribution(const std::vector<VideoRecord>& records) {
  ClassDistribution d;
  std::array<double, kNumLabels> total_s{};
  for (const VideoRecord& rec : records) {
    for (const FrameSpan& s : rec.annotation.spans) {
      size_t c = static_cast<size_t>(label_index(s.label));
      d.clip_count[c] += 1;
      total_s[c] += static_cast<double>(s.length()) / rec.fps;
    }
  }
  for (size_t c = 0; c < kNumLabels; ++c) {
    d.mean_duration_s[c] =
        d.clip_count[c] > 0 ? total_s[c] / static_cast<double>(d.clip_count[c])
                            : 0.0;
    d.total_duration_h[c] = total_s[c] / 3600.0;
  }
  return d;
}

std::vector<ClipRecord> SplitAssignment::clips(
    const std::vector<VideoRecord>& records) const {
  std::vector<ClipRecord> out;
  for (const VideoRecord& rec : records) {
    auto it = std::find_if(videos.begin(), videos.end(), [&](const auto& p) {
      return p.first == rec.video_id;
    });
    if (it == videos.end()) continue;
    for (const FrameSpan& s : rec.annotation.spans) {
      out.push_back(ClipRecord{rec.video_id, s, it->second});
    }
  }
  return out;
}

SplitAssignment split_corpus(const std::vector<VideoRecord>& records,
                             const std::array<double, 3>& ratios,
                             uint64_t seed) {
  double sum = ratios[0] + ratios[1] + ratios[2];
  for (double r : ratios) {
    if (r < 0.0) throw SchemaError("split ratios must be non-negative");
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw SchemaError("split ratios must sum to 1, got " +
                      std::to_string(sum));
  }
  int64_t n = static_cast<int64_t>(records.size());

  // Largest-remainder allocation of n videos to the three buckets.
  std::array<int64_t, 3> sizes{};
  std::array<double, 3> remainders{};
  int64_t assigned = 0;
  for (int b = 0; b < 3; ++b) {
    double exact = static_cast<double>(n) * ratios[static_cast<size_t>(b)];
    sizes[static_cast<size_t>(b)] = static_cast<int64_t>(std::floor(exact));
    remainders[static_cast<size_t>(b)] =
        exact - std::floor(exact);
    assigned += sizes[static_cast<size_t>(b)];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return remainders[static_cast<size_t>(a)] >
           remainders[static_cast<size_t>(b)];
  });
  // leftover is at most 2; hand it to the largest remainders first.
  int64_t leftover = n - assigned;
  for (int64_t k = 0; k < leftover; ++k) {
    sizes[static_cast<size_t>(order[static_cast<size_t>(k)])] += 1;
  }
  for (int b = 0; b < 3; ++b) {
    if (ratios[static_cast<size_t>(b)] > 0.0 &&
        sizes[static_cast<size_t>(b)] == 0) {
      throw InsufficientVideosError(
          "not enough videos (" + std::to_string(n) +
          ") to populate every nonzero split bucket");
    }
  }

  std::vector<size_t> perm(records.size());
  std::iota(perm.begin(), perm.end(), size_t{0});
  RngStream rng(seed, /*stream=*/0xC0'0Fu);
  rng.shuffle(perm);

  SplitAssignment out;
  out.bucket_sizes = sizes;
  out.videos.reserve(records.size());
  for (size_t i = 0; i < perm.size(); ++i) {
    SplitTag tag;
    if (static_cast<int64_t>(i) < sizes[0]) {
      tag = SplitTag::Train;
    } else if (static_cast<int64_t>(i) < sizes[0] + sizes[1]) {
      tag = SplitTag::Val;
    } else {
      tag = SplitTag::Test;
    }
    out.videos.emplace_back(records[perm[i]].video_id, tag);
  }
  return out;
}

std::array<std::optional<double>, kNumLabels> sample_weights(
    const ClassDistribution& distribution) {
  std::array<std::optional<double>, kNumLabels> weights;
  int64_t total = distribution.total_clips();
  int present = 0;
  for (int64_t c : distribution.clip_count) present += c > 0 ? 1 : 0;
  if (present == 0) return weights;
  for (size_t c = 0; c < kNumLabels; ++c) {
    if (distribution.clip_count[c] == 0) {
      log::warn("label " +
                std::string(label_name(static_cast<SceneLabel>(c))) +
                " has no clips; excluded from sampling weights");
      continue;
    }
    weights[c] = static_cast<double>(total) /
                 (static_cast<double>(present) *
                  static_cast<double>(distribution.clip_count[c]));
  }
  return weights;
}

std::string class_distribution_csv(const ClassDistribution& d) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os << "label,clips,avg_dur_s,total_dur_h\n";
  for (size_t c = 0; c < kNumLabels; ++c) {
    os.precision(2);
    os << label_name(static_cast<SceneLabel>(c)) << "," << d.clip_count[c]
       << "," << d.mean_duration_s[c] << "," << d.total_duration_h[c] << "\n";
  }
  return os.str();
}

}  // namespace newsseg
