#include <doctest.h>

#include "newsseg/error.hpp"
#include "newsseg/timeline.hpp"
#include "test_support.hpp"

using namespace newsseg;
using testsupport::per_frame_confusion_oracle;
using testsupport::random_timeline;

namespace {
FrameSpan span(int64_t a, int64_t b, SceneLabel l) { return {a, b, l}; }
}  // namespace

TEST_CASE("normalize_timeline sorts, drops empties, rejects overlaps") {
  CHECK(normalize_timeline({}, 25.0).spans.empty());

  Timeline t = normalize_timeline(
      {span(5, 9, SceneLabel::Story), span(0, 5, SceneLabel::Studio)}, 25.0);
  REQUIRE(t.spans.size() == 2);
  CHECK(t.spans[0] == span(0, 5, SceneLabel::Studio));
  CHECK(t.spans[1] == span(5, 9, SceneLabel::Story));

  CHECK_THROWS_AS(normalize_timeline({span(0, 6, SceneLabel::Story),
                                      span(4, 9, SceneLabel::Studio)},
                                     25.0),
                  OverlapError);

  Timeline dropped = normalize_timeline(
      {span(3, 3, SceneLabel::Story), span(0, 2, SceneLabel::Studio)}, 25.0);
  CHECK(dropped.spans.size() == 1);

  CHECK_THROWS_AS(normalize_timeline({span(0, 2, SceneLabel::Story)}, 0.0),
                  SchemaError);
  CHECK_THROWS_AS(normalize_timeline({span(0, 2, SceneLabel::Story)}, -1.0),
                  SchemaError);
}

TEST_CASE("merge_adjacent merges touching same-label spans only") {
  Timeline merged = merge_adjacent(normalize_timeline(
      {span(0, 5, SceneLabel::Story), span(5, 9, SceneLabel::Story)}, 25.0));
  REQUIRE(merged.spans.size() == 1);
  CHECK(merged.spans[0] == span(0, 9, SceneLabel::Story));

  Timeline different = merge_adjacent(normalize_timeline(
      {span(0, 5, SceneLabel::Story), span(5, 9, SceneLabel::Studio)}, 25.0));
  CHECK(different.spans.size() == 2);

  // A gap blocks the merge even with equal labels.
  Timeline gap = merge_adjacent(normalize_timeline(
      {span(0, 5, SceneLabel::Story), span(6, 9, SceneLabel::Story)}, 25.0));
  CHECK(gap.spans.size() == 2);
}

TEST_CASE("merge_adjacent is idempotent and preserves per-label totals") {
  RngStream rng(42);
  for (int i = 0; i < 500; ++i) {
    Timeline t = random_timeline(rng, 5000);
    Timeline once = merge_adjacent(t);
    CHECK(merge_adjacent(once) == once);
    CHECK(once.label_frame_totals() == t.label_frame_totals());
  }
}

TEST_CASE("confusion_durations matches hand examples") {
  Timeline story100 =
      normalize_timeline({span(0, 100, SceneLabel::Story)}, 25.0);
  DurationConfusion identity = confusion_durations(story100, story100);
  CHECK(identity.cells[1][1] == 100);
  CHECK(identity.total_frames() == 100);

  Timeline pred = normalize_timeline({span(0, 10, SceneLabel::Story)}, 25.0);
  Timeline ref = normalize_timeline(
      {span(0, 8, SceneLabel::Story), span(8, 10, SceneLabel::Studio)}, 25.0);
  DurationConfusion cm = confusion_durations(pred, ref);
  CHECK(cm.cells[1][1] == 8);
  CHECK(cm.cells[1][2] == 2);
  CHECK(cm.total_frames() == 10);
  CHECK(cm == per_frame_confusion_oracle(pred, ref));

  Timeline far = normalize_timeline({span(10, 20, SceneLabel::Studio)}, 25.0);
  Timeline near = normalize_timeline({span(0, 5, SceneLabel::Story)}, 25.0);
  CHECK(confusion_durations(near, far).total_frames() == 0);

  Timeline other_fps = normalize_timeline({span(0, 5, SceneLabel::Story)},
                                          30.0);
  CHECK_THROWS_AS(confusion_durations(near, other_fps), FpsMismatchError);
}

TEST_CASE("confusion_durations equals the per-frame oracle on random pairs") {
  RngStream rng(7);
  for (int i = 0; i < 200; ++i) {
    Timeline a = random_timeline(rng, 20000);
    Timeline b = random_timeline(rng, 20000);
    DurationConfusion fast = confusion_durations(a, b);
    DurationConfusion oracle = per_frame_confusion_oracle(a, b);
    CHECK(fast == oracle);

    // Self-confusion is diagonal with per-label totals.
    DurationConfusion self = confusion_durations(a, a);
    auto totals = a.label_frame_totals();
    for (int p = 0; p < kNumLabels; ++p) {
      for (int q = 0; q < kNumLabels; ++q) {
        CHECK(self.cells[p][q] == (p == q ? totals[p] : 0));
      }
    }

    // Swapping prediction and reference transposes the matrix.
    DurationConfusion swapped = confusion_durations(b, a);
    for (int p = 0; p < kNumLabels; ++p) {
      for (int q = 0; q < kNumLabels; ++q) {
        CHECK(fast.cells[p][q] == swapped.cells[q][p]);
      }
    }
  }
}

TEST_CASE("metrics derivation and undefined sentinels") {
  DurationConfusion diag;
  diag.fps = 25.0;
  for (int i = 0; i < kNumLabels; ++i) diag.cells[i][i] = 10 + i;
  MetricsReport m = metrics(diag);
  for (int i = 0; i < kNumLabels; ++i) {
    CHECK(m.precision[i].value() == doctest::Approx(1.0));
    CHECK(m.recall[i].value() == doctest::Approx(1.0));
  }
  CHECK(m.accuracy.value() == doctest::Approx(1.0));

  // The 8/2 example: accuracy 0.8, Story precision 0.8 recall 1.0,
  // Studio recall 0.
  DurationConfusion cm;
  cm.fps = 25.0;
  cm.cells[1][1] = 8;
  cm.cells[1][2] = 2;
  MetricsReport r = metrics(cm);
  CHECK(r.accuracy.value() == doctest::Approx(0.8));
  CHECK(r.precision[1].value() == doctest::Approx(0.8));
  CHECK(r.recall[1].value() == doctest::Approx(1.0));
  CHECK(r.recall[2].value() == doctest::Approx(0.0));
  CHECK_FALSE(r.precision[2].has_value());  // Studio row has no support
  CHECK(r.total_evaluated_s == doctest::Approx(10.0 / 25.0));

  MetricsReport empty = metrics(DurationConfusion{});
  CHECK_FALSE(empty.accuracy.has_value());
  CHECK(metric_to_string(empty.accuracy) == "undefined");
  CHECK(metric_to_string(r.accuracy) == "0.8000");
}

TEST_CASE("timeline JSON round-trip and schema errors") {
  Timeline t = normalize_timeline({span(0, 50, SceneLabel::Advertisement),
                                   span(60, 90, SceneLabel::Visualisation)},
                                  25.0);
  Timeline back = timeline_from_json(timeline_to_json(t));
  CHECK(back == t);

  CHECK_THROWS_AS(timeline_from_json("{"), SchemaError);
  CHECK_THROWS_AS(timeline_from_json("{\"fps\": 25}"), SchemaError);
  CHECK_THROWS_AS(
      timeline_from_json("{\"fps\":25,\"spans\":[{\"start_frame\":0,"
                         "\"end_frame\":5,\"label\":\"Ads\"}]}"),
      UnknownLabelError);
}
