#include <cmath>

#include <doctest.h>

#include "newsseg/dsp.hpp"
#include "newsseg/error.hpp"
#include "newsseg/features.hpp"
#include "test_support.hpp"

using namespace newsseg;

TEST_CASE("sample_frame_indices covers the padded window uniformly") {
  SamplingSpec spec;  // 16 frames, pad 10, strict
  CHECK(spec.min_span_frames() == 36);

  auto exact = sample_frame_indices(FrameSpan{0, 36, SceneLabel::Story}, spec);
  REQUIRE(exact.size() == 16);
  for (int k = 0; k < 16; ++k) CHECK(exact[k] == 10 + k);

  CHECK_THROWS_AS(
      sample_frame_indices(FrameSpan{0, 35, SceneLabel::Story}, spec),
      SpanTooShortError);

  SamplingSpec spec32;
  spec32.frame_count = 32;
  CHECK(spec32.min_span_frames() == 52);
}

TEST_CASE("clamp mode repeats indices uniformly over short spans") {
  SamplingSpec clamp;
  clamp.mode = SamplingMode::Clamp;
  auto idx = sample_frame_indices(FrameSpan{0, 3, SceneLabel::Story}, clamp);
  std::vector<int64_t> expected = {0, 0, 0, 0, 0, 1, 1, 1,
                                   1, 1, 1, 2, 2, 2, 2, 2};
  CHECK(idx == expected);

  // Long spans behave exactly as strict mode.
  SamplingSpec strict;
  auto a = sample_frame_indices(FrameSpan{100, 200, SceneLabel::Story}, strict);
  auto b = sample_frame_indices(FrameSpan{100, 200, SceneLabel::Story}, clamp);
  CHECK(a == b);
}

TEST_CASE("frame index lists are sorted, bounded, and fixed-length") {
  RngStream rng(5);
  SamplingSpec clamp;
  clamp.mode = SamplingMode::Clamp;
  for (int i = 0; i < 2000; ++i) {
    int64_t start = static_cast<int64_t>(rng.uniform_int(10000));
    int64_t len = 1 + static_cast<int64_t>(rng.uniform_int(400));
    FrameSpan span{start, start + len, SceneLabel::Story};
    auto idx = sample_frame_indices(span, clamp);
    REQUIRE(static_cast<int>(idx.size()) == clamp.frame_count);
    for (size_t k = 0; k < idx.size(); ++k) {
      CHECK(idx[k] >= span.start_frame);
      CHECK(idx[k] < span.end_frame);
      if (k > 0) CHECK(idx[k] >= idx[k - 1]);
    }
  }
}

TEST_CASE("augment_clip identity config reduces to plain resize") {
  RngStream rng(11);
  std::vector<Image> frames;
  for (int i = 0; i < 4; ++i) {
    Image img = Image::solid(40, 30, 0, 0, 0);
    for (auto& b : img.data) b = static_cast<uint8_t>(rng.uniform_int(256));
    frames.push_back(std::move(img));
  }

  RngStream draw(1);
  auto out = augment_clip(frames, AugmentationConfig::identity(), draw);
  REQUIRE(out.size() == frames.size());
  for (size_t i = 0; i < frames.size(); ++i) {
    CHECK(out[i] == resize_bilinear(frames[i], 224, 224));
  }
}

TEST_CASE("augment_clip is deterministic per seed and keeps order") {
  RngStream rng(22);
  std::vector<Image> frames;
  for (int i = 0; i < 5; ++i) {
    Image img = Image::solid(64, 48, 0, 0, 0);
    for (auto& b : img.data) b = static_cast<uint8_t>(rng.uniform_int(256));
    frames.push_back(std::move(img));
  }
  AugmentationConfig cfg;
  RngStream d1(77);
  RngStream d2(77);
  auto a = augment_clip(frames, cfg, d1);
  auto b = augment_clip(frames, cfg, d2);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK(a.size() == frames.size());
}

TEST_CASE("hflip is an involution") {
  RngStream rng(3);
  Image img = Image::solid(33, 17, 0, 0, 0);
  for (auto& b : img.data) b = static_cast<uint8_t>(rng.uniform_int(256));
  CHECK(hflip(hflip(img)) == img);
}

TEST_CASE("audio windows scale with the sampling frame count") {
  AudioMeta meta;
  meta.total_samples = 44100 * 60;

  SamplingSpec s16;
  s16.mode = SamplingMode::Clamp;
  AudioWindow w16 =
      audio_window_for_span(FrameSpan{100, 200, SceneLabel::Story}, s16, meta);
  CHECK(w16.sample_count == 27648);

  SamplingSpec s32;
  s32.frame_count = 32;
  s32.mode = SamplingMode::Clamp;
  AudioWindow w32 =
      audio_window_for_span(FrameSpan{100, 200, SceneLabel::Story}, s32, meta);
  CHECK(w32.sample_count == 55296);

  SamplingSpec s1;
  s1.frame_count = 1;
  s1.pad_frames = 0;
  s1.mode = SamplingMode::Clamp;
  AudioWindow w1 =
      audio_window_for_span(FrameSpan{100, 101, SceneLabel::Story}, s1, meta);
  CHECK(w1.sample_count == 1728);

  // The window tracks the sampled-frame midpoint.
  int64_t center16 = w16.start_sample + w16.sample_count / 2;
  CHECK(center16 == doctest::Approx(150 * 1728).epsilon(0.01));
}

TEST_CASE("extract_audio_window zero-pads out-of-range parts") {
  AudioBuffer audio;
  audio.sample_rate = 44100;
  audio.samples.assign(1000, 0.5f);
  AudioWindow w;
  w.start_sample = -100;
  w.sample_count = 300;
  auto vals = extract_audio_window(audio, w);
  REQUIRE(vals.size() == 300);
  for (int i = 0; i < 100; ++i) CHECK(vals[i] == 0.0f);
  for (int i = 100; i < 300; ++i) CHECK(vals[i] == 0.5f);
}

TEST_CASE("mel_spectrogram shape law and silence floor") {
  std::vector<float> silence(27648, 0.0f);
  MelSpectrogram mel = mel_spectrogram(silence, 44100);
  CHECK(mel.n_mels == 128);
  CHECK(mel.n_frames == 51);
  const float floor_db = std::log(1e-10f);
  for (float v : mel.values) CHECK(v == doctest::Approx(floor_db));

  std::vector<float> longer(55296, 0.0f);
  CHECK(mel_spectrogram(longer, 44100).n_frames == 105);

  CHECK_THROWS_AS(mel_spectrogram(silence, 48000), SampleRateMismatchError);
  std::vector<float> tiny(100, 0.0f);
  CHECK_THROWS_AS(mel_spectrogram(tiny, 44100), TooFewSamplesError);
}

TEST_CASE("a 440 Hz tone peaks in the filterbank bin nearest 440 Hz") {
  std::vector<float> tone(27648);
  for (size_t i = 0; i < tone.size(); ++i) {
    tone[i] = static_cast<float>(
        0.5 * std::sin(2.0 * M_PI * 440.0 * static_cast<double>(i) / 44100.0));
  }
  MelSpectrogram mel = mel_spectrogram(tone, 44100);

  // Time-averaged spectrum argmax.
  int peak = 0;
  double best = -1e300;
  for (int m = 0; m < mel.n_mels; ++m) {
    double avg = 0.0;
    for (int64_t t = 0; t < mel.n_frames; ++t) avg += mel.at(m, t);
    if (avg > best) {
      best = avg;
      peak = m;
    }
  }

  // Independent derivation of the nearest filter center: corners evenly
  // spaced on the HTK mel axis over [0, 22050].
  double mel_max = 2595.0 * std::log10(1.0 + 22050.0 / 700.0);
  int nearest = 0;
  double nearest_dist = 1e300;
  for (int m = 0; m < 128; ++m) {
    double center_mel = mel_max * static_cast<double>(m + 1) / 129.0;
    double center_hz = 700.0 * (std::pow(10.0, center_mel / 2595.0) - 1.0);
    double dist = std::abs(center_hz - 440.0);
    if (dist < nearest_dist) {
      nearest_dist = dist;
      nearest = m;
    }
  }
  CHECK(peak == nearest);
}

TEST_CASE("white-noise STFT power obeys the window-corrected energy law") {
  RngStream rng(2024);
  std::vector<float> noise(60000);
  for (auto& v : noise) v = static_cast<float>(rng.normal());

  const size_t n_fft = 2048;
  const size_t hop = 512;
  auto power = stft_power(noise, n_fft, hop);

  double total = 0.0;  // full-spectrum power reconstructed from one side
  for (const auto& frame : power) {
    total += frame.front() + frame.back();
    for (size_t k = 1; k + 1 < frame.size(); ++k) total += 2.0 * frame[k];
  }

  double energy = 0.0;
  for (float v : noise) energy += static_cast<double>(v) * v;

  auto window = hann_window(n_fft);
  double window_power = 0.0;
  for (double w : window) window_power += w * w;

  double correction = static_cast<double>(power.size()) *
                      static_cast<double>(n_fft) * window_power /
                      static_cast<double>(noise.size());
  CHECK(total / (energy * correction) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("mel spectrogram shape law holds across sample counts") {
  RngStream rng(31);
  for (int i = 0; i < 40; ++i) {
    size_t n = 2048 + rng.uniform_int(40000);
    std::vector<float> pcm(n);
    for (auto& v : pcm) v = static_cast<float>(rng.uniform(-0.5, 0.5));
    MelSpectrogram mel = mel_spectrogram(pcm, 44100);
    CHECK(mel.n_frames == 1 + static_cast<int64_t>((n - 2048) / 512));
    CHECK(mel.values.size() ==
          static_cast<size_t>(mel.n_mels) * static_cast<size_t>(mel.n_frames));
  }
}

TEST_CASE("mel binary export round-trips") {
  testsupport::TempDir dir;
  std::vector<float> pcm(4096);
  RngStream rng(8);
  for (auto& v : pcm) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  MelSpectrogram mel = mel_spectrogram(pcm, 44100);
  std::string path = dir.file("spec.bin");
  write_mel_binary(path, mel);
  MelSpectrogram back = read_mel_binary(path);
  CHECK(back.n_mels == mel.n_mels);
  CHECK(back.n_frames == mel.n_frames);
  CHECK(back.values == mel.values);
}
