#include "newsseg/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "newsseg/dsp.hpp"
#include "newsseg/error.hpp"
#include "newsseg/log.hpp"

namespace newsseg {

std::vector<int64_t> sample_frame_indices(const FrameSpan& span,
                                          const SamplingSpec& spec) {
  if (spec.frame_count < 1) {
    throw SchemaError("frame_count must be at least 1");
  }
  const int64_t span_len = span.length();
  if (span_len < 1) throw SpanTooShortError("span is empty");
  const int64_t fc = spec.frame_count;
  std::vector<int64_t> indices(static_cast<size_t>(fc));

  if (span_len >= spec.min_span_frames()) {
    // Padded window [start+pad, end-pad), endpoints included in the lattice.
    const int64_t window = span_len - 2 * spec.pad_frames;
    const int64_t base = span.start_frame + spec.pad_frames;
    if (fc == 1) {
      indices[0] = base + (window - 1) / 2;
      return indices;
    }
    for (int64_t k = 0; k < fc; ++k) {
      double pos = static_cast<double>(k) * static_cast<double>(window - 1) /
                   static_cast<double>(fc - 1);
      indices[static_cast<size_t>(k)] = base + std::llround(pos);
    }
    return indices;
  }

  if (spec.mode == SamplingMode::Strict) {
    throw SpanTooShortError(
        "span of " + std::to_string(span_len) + " frames is below the " +
        std::to_string(spec.min_span_frames()) + "-frame minimum");
  }
  // Clamp mode: drop the padding and repeat indices uniformly over the
  // frames that exist (balanced repeats, centered allocation).
  for (int64_t k = 0; k < fc; ++k) {
    double pos = (static_cast<double>(k) + 0.5) *
                 static_cast<double>(span_len) / static_cast<double>(fc);
    int64_t idx = static_cast<int64_t>(std::floor(pos));
    indices[static_cast<size_t>(k)] =
        span.start_frame + std::min(idx, span_len - 1);
  }
  return indices;
}

std::vector<Image> augment_clip(const std::vector<Image>& frames,
                                const AugmentationConfig& config,
                                RngStream& rng) {
  if (frames.empty()) throw EmptyInputError("augment_clip needs frames");
  const int width = frames.front().width;
  const int height = frames.front().height;
  for (const Image& f : frames) {
    if (f.width != width || f.height != height) {
      throw DimensionMismatchError("clip frames must share dimensions");
    }
  }

  // One draw per clip; every frame gets the same transform.
  const double scale = rng.uniform(config.scale_min, config.scale_max);
  const double aspect = rng.uniform(config.aspect_min, config.aspect_max);
  const bool flip = rng.bernoulli(config.hflip_prob);
  const double px = rng.uniform();
  const double py = rng.uniform();

  const double root = std::sqrt(aspect);
  int crop_w = static_cast<int>(std::lround(width * scale * root));
  int crop_h = static_cast<int>(std::lround(height * scale / root));
  crop_w = std::clamp(crop_w, 1, width);
  crop_h = std::clamp(crop_h, 1, height);
  const int x0 = static_cast<int>(std::lround(px * (width - crop_w)));
  const int y0 = static_cast<int>(std::lround(py * (height - crop_h)));

  std::vector<Image> out;
  out.reserve(frames.size());
  for (const Image& f : frames) {
    Image piece = crop(f, x0, y0, crop_w, crop_h);
    if (flip) piece = hflip(piece);
    out.push_back(resize_bilinear(piece, config.output_size,
                                  config.output_size));
  }
  return out;
}

AudioWindow audio_window_for_span(const FrameSpan& span,
                                  const SamplingSpec& spec,
                                  const AudioMeta& audio) {
  std::vector<int64_t> indices = sample_frame_indices(span, spec);
  AudioWindow window;
  window.sample_rate = audio.sample_rate;
  window.sample_count =
      static_cast<int64_t>(spec.frame_count) * audio.samples_per_video_frame;
  // Center of the sampled frame range, in frame units (frame i spans
  // [i, i+1), so +1 closes the last frame).
  const double mid_frame =
      (static_cast<double>(indices.front()) +
       static_cast<double>(indices.back()) + 1.0) /
      2.0;
  const int64_t center_sample = std::llround(
      mid_frame * static_cast<double>(audio.samples_per_video_frame));
  window.start_sample = center_sample - window.sample_count / 2;
  if (window.start_sample < 0 ||
      window.start_sample + window.sample_count > audio.total_samples) {
    log::warn("audio window [" + std::to_string(window.start_sample) + "," +
              std::to_string(window.start_sample + window.sample_count) +
              ") extends outside the audio track; zero-padding");
  }
  return window;
}

std::vector<float> extract_audio_window(const AudioBuffer& audio,
                                        const AudioWindow& window) {
  std::vector<float> out(static_cast<size_t>(window.sample_count), 0.0f);
  const int64_t n = static_cast<int64_t>(audio.samples.size());
  const int64_t lo = std::max<int64_t>(window.start_sample, 0);
  const int64_t hi =
      std::min<int64_t>(window.start_sample + window.sample_count, n);
  for (int64_t s = lo; s < hi; ++s) {
    out[static_cast<size_t>(s - window.start_sample)] =
        audio.samples[static_cast<size_t>(s)];
  }
  return out;
}

MelSpectrogram mel_spectrogram(const std::vector<float>& pcm, int sample_rate,
                               int n_fft, int hop, int n_mels) {
  if (sample_rate != 44100) {
    throw SampleRateMismatchError("expected 44100 Hz input, got " +
                                  std::to_string(sample_rate) + " Hz");
  }
  if (static_cast<int64_t>(pcm.size()) < n_fft) {
    throw TooFewSamplesError("need at least " + std::to_string(n_fft) +
                             " samples, got " + std::to_string(pcm.size()));
  }
  const auto power = stft_power(pcm, static_cast<size_t>(n_fft),
                                static_cast<size_t>(hop));
  const MelFilterbank fb = MelFilterbank::build(
      n_mels, static_cast<size_t>(n_fft), static_cast<double>(sample_rate));

  MelSpectrogram mel;
  mel.n_mels = n_mels;
  mel.n_frames = static_cast<int64_t>(power.size());
  mel.values.resize(static_cast<size_t>(n_mels) *
                    static_cast<size_t>(mel.n_frames));
  for (int m = 0; m < n_mels; ++m) {
    const auto& w = fb.weights[static_cast<size_t>(m)];
    for (size_t t = 0; t < power.size(); ++t) {
      double acc = 0.0;
      const auto& frame = power[t];
      for (size_t k = 0; k < frame.size(); ++k) {
        if (w[k] != 0.0) acc += w[k] * frame[k];
      }
      mel.values[static_cast<size_t>(m) * power.size() + t] =
          static_cast<float>(std::log(acc + kMelLogFloor));
    }
  }
  return mel;
}

void write_mel_binary(const std::string& path, const MelSpectrogram& mel) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw IoError("cannot write spectrogram: " + path);
  uint32_t header[2] = {static_cast<uint32_t>(mel.n_mels),
                        static_cast<uint32_t>(mel.n_frames)};
  bool ok = std::fwrite(header, sizeof(header), 1, fp) == 1;
  ok = ok && std::fwrite(mel.values.data(), sizeof(float), mel.values.size(),
                         fp) == mel.values.size();
  std::fclose(fp);
  if (!ok) throw IoError("short write to " + path);
}

MelSpectrogram read_mel_binary(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (fp == nullptr) throw IoError("cannot read spectrogram: " + path);
  uint32_t header[2];
  if (std::fread(header, sizeof(header), 1, fp) != 1) {
    std::fclose(fp);
    throw CorruptFileError("truncated spectrogram header: " + path);
  }
  MelSpectrogram mel;
  mel.n_mels = static_cast<int>(header[0]);
  mel.n_frames = static_cast<int64_t>(header[1]);
  mel.values.resize(static_cast<size_t>(mel.n_mels) *
                    static_cast<size_t>(mel.n_frames));
  size_t got = std::fread(mel.values.data(), sizeof(float), mel.values.size(),
                          fp);
  std::fclose(fp);
  if (got != mel.values.size()) {
    throw CorruptFileError("truncated spectrogram payload: " + path);
  }
  return mel;
}

}  // namespace newsseg
