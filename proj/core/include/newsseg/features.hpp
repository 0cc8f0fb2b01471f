#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "newsseg/image.hpp"
#include "newsseg/rng.hpp"
#include "newsseg/timeline.hpp"
#include "newsseg/wav.hpp"

namespace newsseg {

enum class SamplingMode { Strict, Clamp };

struct SamplingSpec {
  int frame_count = 16;
  int pad_frames = 10;
  SamplingMode mode = SamplingMode::Strict;

  /// frame_count + 2*pad_frames: 36 for 16-frame clips, 52 for 32.
  int64_t min_span_frames() const {
    return static_cast<int64_t>(frame_count) + 2 * pad_frames;
  }
};

/// Uniformly spaced frame indices inside the padded window. Spans shorter
/// than min_span_frames throw SpanTooShortError in strict mode; in clamp
/// mode the padding is dropped and indices repeat uniformly over the frames
/// that exist.
std::vector<int64_t> sample_frame_indices(const FrameSpan& span,
                                          const SamplingSpec& spec);

struct AugmentationConfig {
  double scale_min = 0.5;
  double scale_max = 1.0;
  double aspect_min = 0.75;
  double aspect_max = 1.33;
  double hflip_prob = 0.5;
  int output_size = 224;

  /// No-op draw: full-frame crop, no flip, plain resize.
  static AugmentationConfig identity() {
    return AugmentationConfig{1.0, 1.0, 1.0, 1.0, 0.0, 224};
  }
};

/// One scale/aspect/position/flip draw applied identically to every frame
/// of the clip, then bilinear resize to output_size. With the identity
/// config the result is bitwise equal to resize_bilinear.
std::vector<Image> augment_clip(const std::vector<Image>& frames,
                                const AugmentationConfig& config,
                                RngStream& rng);

struct AudioMeta {
  int sample_rate = 44100;
  int64_t total_samples = 0;
  int64_t samples_per_video_frame = 1728;  // 27,648 samples per 16 frames
};

struct AudioWindow {
  int64_t start_sample = 0;   // may be negative; fill is zero-padded
  int64_t sample_count = 0;   // frame_count * samples_per_video_frame
  int sample_rate = 44100;
};

/// Window of frame_count * samples_per_video_frame samples centered on the
/// midpoint of the sampled frames. Ranges outside the audio are zero-padded
/// with a warning.
AudioWindow audio_window_for_span(const FrameSpan& span,
                                  const SamplingSpec& spec,
                                  const AudioMeta& audio);

/// Materializes the window from a buffer, zero-padding out-of-range parts.
std::vector<float> extract_audio_window(const AudioBuffer& audio,
                                        const AudioWindow& window);

struct MelSpectrogram {
  int n_mels = 128;
  int64_t n_frames = 0;
  std::vector<float> values;  // row-major [n_mels][n_frames], log power

  float at(int mel, int64_t frame) const {
    return values[static_cast<size_t>(mel) * static_cast<size_t>(n_frames) +
                  static_cast<size_t>(frame)];
  }
};

inline constexpr double kMelLogFloor = 1e-10;

/// Hann-windowed power STFT without center padding, triangular HTK-mel
/// filterbank over 0..sr/2, then log(power + 1e-10).
/// n_frames follows 1 + floor((samples - n_fft) / hop).
MelSpectrogram mel_spectrogram(const std::vector<float>& pcm, int sample_rate,
                               int n_fft = 2048, int hop = 512,
                               int n_mels = 128);

/// Flat binary export: n_mels and n_frames as 32-bit little-endian
/// integers, then row-major 32-bit floats.
void write_mel_binary(const std::string& path, const MelSpectrogram& mel);
MelSpectrogram read_mel_binary(const std::string& path);

}  // namespace newsseg
