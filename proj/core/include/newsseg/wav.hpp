#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace newsseg {

/// Mono PCM audio with samples scaled to [-1, 1).
struct AudioBuffer {
  int sample_rate = 44100;
  std::vector<float> samples;
};

/// Reads a RIFF/WAVE file. Only PCM 16-bit mono is accepted; anything else
/// is rejected with SampleRateMismatchError (format) or CorruptFileError.
AudioBuffer read_wav(const std::string& path);

/// Writes PCM 16-bit mono (values clamped to [-1, 1]).
void write_wav(const std::string& path, const AudioBuffer& audio);

}  // namespace newsseg
