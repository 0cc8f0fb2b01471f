#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace newsseg {

/// In-place iterative radix-2 FFT. Length must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& buf);

/// Periodic Hann window of length n.
std::vector<double> hann_window(size_t n);

/// One-sided power spectrogram (no center padding): frame t covers samples
/// [t*hop, t*hop + n_fft). Rows are frames, columns the n_fft/2 + 1 bins of
/// |X|^2. Requires samples.size() >= n_fft and power-of-two n_fft.
std::vector<std::vector<double>> stft_power(const std::vector<float>& samples,
                                            size_t n_fft, size_t hop);

/// Number of STFT frames produced for a given sample count.
int64_t stft_frame_count(int64_t sample_count, int64_t n_fft, int64_t hop);

/// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular mel filterbank (peak 1.0), n_mels filters spanning
/// [0, sample_rate/2]. Each row holds weights over the n_fft/2+1 bins.
struct MelFilterbank {
  int n_mels = 0;
  size_t n_bins = 0;
  std::vector<std::vector<double>> weights;   // [n_mels][n_bins]
  std::vector<double> center_hz;              // filter peak frequencies

  static MelFilterbank build(int n_mels, size_t n_fft, double sample_rate);
};

}  // namespace newsseg
