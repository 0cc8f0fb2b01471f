#include <doctest.h>

#include "newsseg/error.hpp"
#include "newsseg/shotdetect.hpp"
#include "test_support.hpp"

using namespace newsseg;
using testsupport::color_block_stream;

TEST_CASE("frame_stats evaluates the HSV means") {
  FrameStats black = frame_stats(Image::solid(8, 8, 0, 0, 0));
  CHECK(black.mean_h == doctest::Approx(0.0));
  CHECK(black.mean_s == doctest::Approx(0.0));
  CHECK(black.mean_v == doctest::Approx(0.0));

  FrameStats white = frame_stats(Image::solid(8, 8, 255, 255, 255));
  CHECK(white.mean_h == doctest::Approx(0.0));
  CHECK(white.mean_s == doctest::Approx(0.0));
  CHECK(white.mean_v == doctest::Approx(255.0));

  FrameStats red = frame_stats(Image::solid(8, 8, 255, 0, 0));
  CHECK(red.mean_h == doctest::Approx(0.0));
  CHECK(red.mean_s == doctest::Approx(255.0));
  CHECK(red.mean_v == doctest::Approx(255.0));

  Image empty;
  CHECK_THROWS_AS(frame_stats(empty), EmptyFrameError);
}

TEST_CASE("content_score on synthetic pairs") {
  Image black = Image::solid(16, 16, 0, 0, 0);
  Image white = Image::solid(16, 16, 255, 255, 255);
  CHECK(content_score(black, black) == doctest::Approx(0.0));
  CHECK(content_score(black, white) == doctest::Approx(85.0));

  // Horizontally symmetric frame vs its flip.
  Image sym(Image::solid(16, 16, 0, 0, 0));
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      uint8_t v = static_cast<uint8_t>(std::min(x, 15 - x) * 16);
      sym.pixel(x, y)[0] = v;
      sym.pixel(x, y)[1] = v;
      sym.pixel(x, y)[2] = v;
    }
  }
  CHECK(content_score(sym, hflip(sym)) == doctest::Approx(0.0));

  Image small = Image::solid(8, 8, 0, 0, 0);
  CHECK_THROWS_AS(content_score(black, small), DimensionMismatchError);
}

TEST_CASE("detect_shots finds hard cuts and suppresses early ones") {
  DetectorConfig cfg;  // threshold 27, min 15

  // 200 constant frames -> single shot.
  {
    MemoryFrameSource src(color_block_stream({{200, {10, 10, 10}}}));
    ShotList shots = detect_shots(src, cfg, 25.0);
    CHECK(shots.boundaries.empty());
    CHECK(shots.frame_count == 200);
    CHECK(shots.spans().size() == 1);
  }

  // 100 black then 100 white: score 85 at frame 100.
  {
    MemoryFrameSource src(color_block_stream(
        {{100, {0, 0, 0}}, {100, {255, 255, 255}}}));
    ShotList shots = detect_shots(src, cfg, 25.0);
    REQUIRE(shots.boundaries.size() == 1);
    CHECK(shots.boundaries[0] == 100);
    auto spans = shots.spans();
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].start_frame == 0);
    CHECK(spans[0].end_frame == 100);
    CHECK(spans[1].end_frame == 200);
  }

  // A cut at frame 5 is suppressed by min_shot_frames = 15.
  {
    MemoryFrameSource src(color_block_stream(
        {{5, {0, 0, 0}}, {100, {255, 255, 255}}}));
    ShotList shots = detect_shots(src, cfg, 25.0);
    CHECK(shots.boundaries.empty());
  }

  // Degenerate one-frame stream is a single shot.
  {
    MemoryFrameSource src(color_block_stream({{1, {9, 9, 9}}}));
    ShotList shots = detect_shots(src, cfg, 25.0);
    CHECK(shots.frame_count == 1);
    CHECK(shots.spans().size() == 1);
  }

  {
    MemoryFrameSource src({});
    CHECK_THROWS_AS(detect_shots(src, cfg, 25.0), EmptyInputError);
  }
}

TEST_CASE("shot spans tile the stream and detection is deterministic") {
  RngStream rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<int64_t, std::array<uint8_t, 3>>> blocks;
    int n_blocks = 1 + static_cast<int>(rng.uniform_int(8));
    for (int b = 0; b < n_blocks; ++b) {
      blocks.push_back({1 + static_cast<int64_t>(rng.uniform_int(60)),
                        {static_cast<uint8_t>(rng.uniform_int(256)),
                         static_cast<uint8_t>(rng.uniform_int(256)),
                         static_cast<uint8_t>(rng.uniform_int(256))}});
    }
    auto frames = color_block_stream(blocks, 16, 16);
    MemoryFrameSource src1(frames);
    MemoryFrameSource src2(frames);
    DetectorConfig cfg;
    ShotList s1 = detect_shots(src1, cfg, 25.0);
    ShotList s2 = detect_shots(src2, cfg, 25.0);
    CHECK(s1.boundaries == s2.boundaries);

    // Tiling: contiguous spans covering [0, N).
    auto spans = s1.spans();
    int64_t cursor = 0;
    for (const FrameSpan& s : spans) {
      CHECK(s.start_frame == cursor);
      cursor = s.end_frame;
    }
    CHECK(cursor == s1.frame_count);

    // All but the last shot respect the minimum length.
    for (size_t i = 0; i + 1 < spans.size(); ++i) {
      CHECK(spans[i].length() >= cfg.min_shot_frames);
    }
  }
}

TEST_CASE("raising the threshold never adds boundaries") {
  RngStream rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Image> frames;
    int64_t n = 40 + static_cast<int64_t>(rng.uniform_int(160));
    for (int64_t i = 0; i < n; ++i) {
      frames.push_back(Image::solid(
          8, 8, static_cast<uint8_t>(rng.uniform_int(256)),
          static_cast<uint8_t>(rng.uniform_int(256)),
          static_cast<uint8_t>(rng.uniform_int(256))));
    }
    size_t prev_count = SIZE_MAX;
    for (double threshold : {5.0, 15.0, 27.0, 50.0, 90.0}) {
      DetectorConfig cfg;
      cfg.threshold = threshold;
      MemoryFrameSource src(frames);
      ShotList shots = detect_shots(src, cfg, 25.0);
      CHECK(shots.boundaries.size() <= prev_count);
      prev_count = shots.boundaries.size();
    }
  }
}

TEST_CASE("shot list JSON round-trip") {
  ShotList shots;
  shots.fps = 25.0;
  shots.frame_count = 500;
  shots.boundaries = {100, 250, 400};
  ShotList back = shotlist_from_json(shotlist_to_json(shots));
  CHECK(back.fps == shots.fps);
  CHECK(back.frame_count == shots.frame_count);
  CHECK(back.boundaries == shots.boundaries);

  CHECK_THROWS_AS(shotlist_from_json("{\"fps\":25,\"frame_count\":10,"
                                     "\"boundaries\":[10]}"),
                  SchemaError);
}
