#include "newsseg/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "newsseg/error.hpp"

namespace newsseg {

namespace {

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 24) & 0xff));
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
}

std::vector<uint8_t> read_file(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (fp == nullptr) throw IoError("cannot open WAV file: " + path);
  std::fseek(fp, 0, SEEK_END);
  long size = std::ftell(fp);
  std::fseek(fp, 0, SEEK_SET);
  std::vector<uint8_t> bytes(static_cast<size_t>(std::max(0L, size)));
  size_t got = std::fread(bytes.data(), 1, bytes.size(), fp);
  std::fclose(fp);
  bytes.resize(got);
  return bytes;
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::vector<uint8_t> bytes = read_file(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw CorruptFileError("not a RIFF/WAVE file: " + path);
  }

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const uint8_t* data_ptr = nullptr;
  uint32_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    uint32_t len = read_u32(chunk + 4);
    const uint8_t* body = chunk + 8;
    if (pos + 8 + len > bytes.size()) {
      throw CorruptFileError("truncated chunk in WAV file: " + path);
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) throw CorruptFileError("short fmt chunk in " + path);
      format = read_u16(body);
      channels = read_u16(body + 2);
      sample_rate = read_u32(body + 4);
      bits = read_u16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data_ptr = body;
      data_len = len;
    }
    pos += 8 + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_ptr == nullptr) {
    throw CorruptFileError("WAV file missing fmt or data chunk: " + path);
  }
  if (format != 1 || bits != 16) {
    throw SampleRateMismatchError(
        "only PCM 16-bit WAV is supported (" + path + " has format " +
        std::to_string(format) + ", " + std::to_string(bits) + " bits)");
  }
  if (channels != 1) {
    throw SampleRateMismatchError("only mono WAV is supported (" + path +
                                  " has " + std::to_string(channels) +
                                  " channels)");
  }

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(sample_rate);
  size_t n = data_len / 2;
  audio.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    int16_t s = static_cast<int16_t>(read_u16(data_ptr + 2 * i));
    audio.samples[i] = static_cast<float>(s) / 32768.0f;
  }
  return audio;
}

void write_wav(const std::string& path, const AudioBuffer& audio) {
  std::vector<uint8_t> out;
  uint32_t data_len = static_cast<uint32_t>(audio.samples.size() * 2);
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<uint32_t>(audio.sample_rate * 2));
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_len);
  for (float s : audio.samples) {
    float clamped = std::clamp(s, -1.0f, 1.0f);
    int16_t v = static_cast<int16_t>(std::lround(clamped * 32767.0f));
    put_u16(out, static_cast<uint16_t>(v));
  }
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw IoError("cannot write WAV file: " + path);
  size_t written = std::fwrite(out.data(), 1, out.size(), fp);
  std::fclose(fp);
  if (written != out.size()) throw IoError("short write to " + path);
}

}  // namespace newsseg
