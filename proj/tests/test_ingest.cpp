#include <algorithm>
#include <set>

#include <doctest.h>

#include "newsseg/error.hpp"
#include "newsseg/ingest.hpp"
#include "test_support.hpp"

using namespace newsseg;

#ifndef NEWSSEG_FIXTURE_DIR
#define NEWSSEG_FIXTURE_DIR "tests/fixtures"
#endif

namespace {

std::string one_video_doc(const std::string& regions) {
  return "{\"videos\":[{\"video_id\":\"v1\",\"fps\":25,\"frame_count\":1000,"
         "\"width\":384,\"height\":216,\"audio_sample_rate\":44100,"
         "\"regions\":[" +
         regions + "]}]}";
}

std::vector<VideoRecord> synthetic_corpus(int n_videos) {
  std::vector<VideoRecord> records;
  for (int i = 0; i < n_videos; ++i) {
    VideoRecord rec;
    rec.video_id = "vid" + std::to_string(i);
    rec.fps = 25.0;
    rec.frame_count = 1000;
    rec.width = 384;
    rec.height = 216;
    rec.audio_sample_rate = 44100;
    rec.annotation = normalize_timeline(
        {FrameSpan{0, 250, SceneLabel::Story}}, rec.fps);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

TEST_CASE("parse_annotations handles the documented schema") {
  auto records = parse_annotations(one_video_doc(
      "{\"start_frame\":0,\"end_frame\":100,\"label\":\"Story\"},"
      "{\"start_frame\":150,\"end_frame\":400,\"label\":\"Studio\"}"));
  REQUIRE(records.size() == 1);
  CHECK(records[0].annotation.spans.size() == 2);
  CHECK(records[0].fps == 25.0);

  CHECK_THROWS_AS(parse_annotations(one_video_doc(
                      "{\"start_frame\":0,\"end_frame\":10,"
                      "\"label\":\"Ads\"}")),
                  UnknownLabelError);
  CHECK_THROWS_AS(parse_annotations(one_video_doc(
                      "{\"start_frame\":20,\"end_frame\":10,"
                      "\"label\":\"Story\"}")),
                  SchemaError);
  CHECK_THROWS_AS(parse_annotations(one_video_doc(
                      "{\"start_frame\":0,\"end_frame\":10,"
                      "\"label\":\"Story\"},"
                      "{\"start_frame\":5,\"end_frame\":15,"
                      "\"label\":\"Story\"}")),
                  OverlapError);
  CHECK_THROWS_AS(parse_annotations("{\"videos\":[{\"video_id\":\"x\"}]}"),
                  SchemaError);
  // Region past frame_count violates the record invariant.
  CHECK_THROWS_AS(parse_annotations(one_video_doc(
                      "{\"start_frame\":900,\"end_frame\":1200,"
                      "\"label\":\"Story\"}")),
                  SchemaError);
}

TEST_CASE("parse -> serialize -> parse is the identity") {
  std::string fixture =
      testsupport::read_file(std::string(NEWSSEG_FIXTURE_DIR) +
                             "/table1.json");
  auto records = parse_annotations(fixture);
  auto again = parse_annotations(annotations_to_json(records));
  CHECK(records == again);
}

TEST_CASE("class_distribution reproduces the bundled corpus fixture") {
  auto records = parse_annotations(testsupport::read_file(
      std::string(NEWSSEG_FIXTURE_DIR) + "/table1.json"));
  ClassDistribution d = class_distribution(records);

  const int64_t clips[kNumLabels] = {126, 631, 655, 295, 125};
  const double avg[kNumLabels] = {62.75, 78.03, 30.38, 7.82, 36.28};
  const double hours[kNumLabels] = {2.20, 13.68, 5.53, 0.64, 1.26};
  for (int c = 0; c < kNumLabels; ++c) {
    CHECK(d.clip_count[c] == clips[c]);
    CHECK(std::abs(d.mean_duration_s[c] - avg[c]) < 0.01);
    CHECK(std::abs(d.total_duration_h[c] - hours[c]) < 0.01);
    // Internal consistency: mean * count == hours * 3600 within 0.5%.
    double lhs = d.mean_duration_s[c] * static_cast<double>(d.clip_count[c]);
    double rhs = d.total_duration_h[c] * 3600.0;
    CHECK(std::abs(lhs - rhs) <= 0.005 * rhs);
  }
  CHECK(d.total_clips() == 1832);
}

TEST_CASE("class_distribution trivial cases") {
  CHECK(class_distribution({}).total_clips() == 0);

  std::vector<VideoRecord> one = synthetic_corpus(1);
  ClassDistribution d = class_distribution(one);
  CHECK(d.clip_count[label_index(SceneLabel::Story)] == 1);
  CHECK(d.mean_duration_s[1] == doctest::Approx(10.0));
  CHECK(d.total_duration_h[1] == doctest::Approx(10.0 / 3600.0));
}

TEST_CASE("split_corpus is deterministic and uses largest remainders") {
  auto ten = synthetic_corpus(10);
  SplitAssignment a = split_corpus(ten, {0.8, 0.1, 0.1}, 7);
  SplitAssignment b = split_corpus(ten, {0.8, 0.1, 0.1}, 7);
  CHECK(a.videos == b.videos);

  auto two = synthetic_corpus(2);
  CHECK_THROWS_AS(split_corpus(two, {0.4, 0.3, 0.3}, 1),
                  InsufficientVideosError);

  auto corpus41 = synthetic_corpus(41);
  SplitAssignment s = split_corpus(corpus41, {0.7, 0.15, 0.15}, 3);
  CHECK(s.bucket_sizes[0] == 29);
  CHECK(s.bucket_sizes[1] == 6);
  CHECK(s.bucket_sizes[2] == 6);

  // Partition: every video appears exactly once.
  std::set<std::string> seen;
  for (const auto& [id, tag] : s.videos) seen.insert(id);
  CHECK(seen.size() == 41);

  CHECK_THROWS_AS(split_corpus(ten, {0.5, 0.4, 0.2}, 0), SchemaError);
}

TEST_CASE("sample_weights normalizes inverse class frequency") {
  ClassDistribution uniform;
  for (int c = 0; c < kNumLabels; ++c) uniform.clip_count[c] = 100;
  auto w = sample_weights(uniform);
  for (int c = 0; c < kNumLabels; ++c) {
    CHECK(w[c].value() == doctest::Approx(1.0));
  }

  ClassDistribution table1;
  table1.clip_count = {126, 631, 655, 295, 125};
  auto tw = sample_weights(table1);
  CHECK(tw[0].value() == doctest::Approx(1832.0 / (5.0 * 126.0)));
  CHECK(tw[0].value() == doctest::Approx(2.908).epsilon(0.001));
  CHECK(tw[2].value() == doctest::Approx(0.559).epsilon(0.001));

  ClassDistribution missing = table1;
  missing.clip_count[3] = 0;
  auto mw = sample_weights(missing);
  int defined = 0;
  for (const auto& v : mw) defined += v.has_value() ? 1 : 0;
  CHECK(defined == 4);
  CHECK_FALSE(mw[3].has_value());
}

TEST_CASE("weighted sampling yields uniform label frequencies") {
  ClassDistribution table1;
  table1.clip_count = {126, 631, 655, 295, 125};
  auto w = sample_weights(table1);

  // Per-clip weights -> CDF -> one million draws.
  std::vector<double> cdf;
  std::vector<int> clip_label;
  double acc = 0.0;
  for (int c = 0; c < kNumLabels; ++c) {
    for (int64_t i = 0; i < table1.clip_count[c]; ++i) {
      acc += w[c].value();
      cdf.push_back(acc);
      clip_label.push_back(c);
    }
  }
  RngStream rng(12345);
  std::array<int64_t, kNumLabels> hits{};
  const int64_t draws = 1000000;
  for (int64_t i = 0; i < draws; ++i) {
    double u = rng.uniform() * acc;
    size_t idx = static_cast<size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (idx >= clip_label.size()) idx = clip_label.size() - 1;
    hits[static_cast<size_t>(clip_label[idx])] += 1;
  }
  for (int c = 0; c < kNumLabels; ++c) {
    double freq = static_cast<double>(hits[c]) / static_cast<double>(draws);
    CHECK(std::abs(freq - 0.2) < 0.01);
  }
}

TEST_CASE("clip records derive one-to-one from annotation spans") {
  auto records = synthetic_corpus(4);
  SplitAssignment s = split_corpus(records, {0.5, 0.25, 0.25}, 11);
  auto clips = s.clips(records);
  CHECK(clips.size() == 4);
  for (const ClipRecord& c : clips) {
    CHECK(c.span.length() == 250);
  }
}
