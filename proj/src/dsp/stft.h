// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_DSP_STFT_H_
#define EEGSEP_DSP_STFT_H_

#include <complex>
#include <cstdint>
#include <vector>

namespace eegsep::dsp {

struct Spectrogram {
  int64_t frames = 0;
  int64_t bins = 0;  // window_len/2 + 1
  int64_t window_len = 0;
  int64_t hop = 0;
  double sample_rate = 0;
  std::vector<std::complex<double>> data;  // frames x bins, row major

  std::complex<double>& at(int64_t f, int64_t b) {
    return data[static_cast<size_t>(f * bins + b)];
  }
  const std::complex<double>& at(int64_t f, int64_t b) const {
    return data[static_cast<size_t>(f * bins + b)];
  }
  // Frequency of bin b in Hz.
  double bin_hz(int64_t b) const {
    return static_cast<double>(b) * sample_rate / static_cast<double>(window_len);
  }
};

// Periodic Hann window (exact 3-term Fourier series: leakage of a
// bin-centered tone is confined to +-1 bin).
std::vector<double> hann_window(int64_t n);

// Hann-windowed STFT. Frames are fully inside the signal (no padding):
// frames = 1 + (len - window_len) / hop. Signals shorter than one window
// raise LengthError.
Spectrogram stft(const std::vector<double>& x, int64_t window_len, int64_t hop,
                 double sample_rate);

}  // namespace eegsep::dsp

#endif  // EEGSEP_DSP_STFT_H_
