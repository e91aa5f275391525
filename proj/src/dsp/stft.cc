// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dsp/stft.h"

#include <cmath>

#include "common/error.h"
#include "dsp/fft.h"

namespace eegsep::dsp {

std::vector<double> hann_window(int64_t n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    w[static_cast<size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

Spectrogram stft(const std::vector<double>& x, int64_t window_len, int64_t hop,
                 double sample_rate) {
  if (window_len < 1 || hop < 1) throw LengthError("stft: window/hop >= 1 required");
  if (static_cast<int64_t>(x.size()) < window_len) {
    throw LengthError("stft: signal shorter than one window");
  }
  Spectrogram s;
  s.window_len = window_len;
  s.hop = hop;
  s.sample_rate = sample_rate;
  s.bins = window_len / 2 + 1;
  s.frames = 1 + (static_cast<int64_t>(x.size()) - window_len) / hop;
  s.data.resize(static_cast<size_t>(s.frames * s.bins));

  std::vector<double> win = hann_window(window_len);
  std::vector<double> frame(static_cast<size_t>(window_len));
  FftR2C fft(window_len);
  for (int64_t f = 0; f < s.frames; ++f) {
    const double* src = x.data() + f * hop;
    for (int64_t i = 0; i < window_len; ++i)
      frame[static_cast<size_t>(i)] = src[i] * win[static_cast<size_t>(i)];
    fft.run(frame.data(), &s.at(f, 0));
  }
  return s;
}

}  // namespace eegsep::dsp
