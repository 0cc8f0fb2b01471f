#include "newsseg/dsp.hpp"

#include <cmath>

#include "newsseg/error.hpp"

namespace newsseg {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

void fft_inplace(std::vector<std::complex<double>>& buf) {
  const size_t n = buf.size();
  if (!is_pow2(n)) {
    throw ShapeError("FFT length must be a power of two, got " +
                     std::to_string(n));
  }
  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(buf[i], buf[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * kPi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = buf[i + k];
        std::complex<double> v = buf[i + k + len / 2] * w;
        buf[i + k] = u + v;
        buf[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<double> hann_window(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

int64_t stft_frame_count(int64_t sample_count, int64_t n_fft, int64_t hop) {
  if (sample_count < n_fft) return 0;
  return 1 + (sample_count - n_fft) / hop;
}

std::vector<std::vector<double>> stft_power(const std::vector<float>& samples,
                                            size_t n_fft, size_t hop) {
  if (!is_pow2(n_fft)) {
    throw ShapeError("n_fft must be a power of two, got " +
                     std::to_string(n_fft));
  }
  if (samples.size() < n_fft) {
    throw TooFewSamplesError("need at least " + std::to_string(n_fft) +
                             " samples, got " +
                             std::to_string(samples.size()));
  }
  const std::vector<double> window = hann_window(n_fft);
  const size_t n_frames = static_cast<size_t>(
      stft_frame_count(static_cast<int64_t>(samples.size()),
                       static_cast<int64_t>(n_fft),
                       static_cast<int64_t>(hop)));
  const size_t n_bins = n_fft / 2 + 1;

  std::vector<std::vector<double>> power(n_frames,
                                         std::vector<double>(n_bins));
  std::vector<std::complex<double>> buf(n_fft);
  for (size_t t = 0; t < n_frames; ++t) {
    const size_t off = t * hop;
    for (size_t i = 0; i < n_fft; ++i) {
      buf[i] = {window[i] * static_cast<double>(samples[off + i]), 0.0};
    }
    fft_inplace(buf);
    for (size_t k = 0; k < n_bins; ++k) {
      power[t][k] = std::norm(buf[k]);
    }
  }
  return power;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank MelFilterbank::build(int n_mels, size_t n_fft,
                                   double sample_rate) {
  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.n_bins = n_fft / 2 + 1;
  fb.weights.assign(static_cast<size_t>(n_mels),
                    std::vector<double>(fb.n_bins, 0.0));
  fb.center_hz.resize(static_cast<size_t>(n_mels));

  const double f_max = sample_rate / 2.0;
  const double mel_max = hz_to_mel(f_max);
  // n_mels + 2 corner points, evenly spaced on the mel axis.
  std::vector<double> corners_hz(static_cast<size_t>(n_mels) + 2);
  for (size_t i = 0; i < corners_hz.size(); ++i) {
    corners_hz[i] = mel_to_hz(mel_max * static_cast<double>(i) /
                              static_cast<double>(n_mels + 1));
  }
  for (int m = 0; m < n_mels; ++m) {
    double lo = corners_hz[static_cast<size_t>(m)];
    double mid = corners_hz[static_cast<size_t>(m) + 1];
    double hi = corners_hz[static_cast<size_t>(m) + 2];
    fb.center_hz[static_cast<size_t>(m)] = mid;
    for (size_t k = 0; k < fb.n_bins; ++k) {
      double f = static_cast<double>(k) * sample_rate /
                 static_cast<double>(n_fft);
      double w = 0.0;
      if (f > lo && f < mid) {
        w = (f - lo) / (mid - lo);
      } else if (f == mid) {
        w = 1.0;
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      fb.weights[static_cast<size_t>(m)][k] = w;
    }
  }
  return fb;
}

}  // namespace newsseg
