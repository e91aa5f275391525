// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "eeg/features.h"

#include <cmath>
#include <complex>
#include <vector>

#include "common/error.h"
#include "dsp/bands.h"
#include "dsp/fft.h"

namespace eegsep::eeg {

nn::Tensor<double> frequency_features(const nn::Tensor<double>& eeg,
                                      double fs) {
  if (eeg.rank() != 2) {
    throw DimError("frequency_features expects (channels, samples), got " +
                   nn::shape_str(eeg.shape()));
  }
  if (fs < 100.0) {
    throw ConfigError("frequency_features needs fs >= 100 Hz for the gamma "
                      "band, got " + std::to_string(fs));
  }
  const int64_t c = eeg.dim(0);
  const int64_t n = eeg.dim(1);
  if (static_cast<double>(n) < fs / 4.0 || n < 2) {
    throw LengthError("frequency_features: recording too short (" +
                      std::to_string(n) + " samples); need >= fs/4 so every "
                      "band covers a frequency bin");
  }

  // Symmetric Hann window, mirrored so w[i] == w[n-1-i] holds bitwise; a
  // time-reversed input then produces the same windowed magnitudes.
  std::vector<double> win(static_cast<size_t>(n));
  for (int64_t i = 0; i * 2 <= n - 1; ++i) {
    double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                                    static_cast<double>(n - 1));
    win[static_cast<size_t>(i)] = w;
    win[static_cast<size_t>(n - 1 - i)] = w;
  }
  double wss = 0.0;
  for (double w : win) wss += w * w;
  const double base = 1.0 / (fs * wss);
  const int64_t nyquist = n / 2;

  dsp::FftR2C fft(n);
  const auto& bands = dsp::canonical_bands();
  nn::Tensor<double> out({c, kFreqFeatureWidth});
  std::vector<double> frame(static_cast<size_t>(n));
  std::vector<std::complex<double>> spec(static_cast<size_t>(fft.bins()));
  for (int64_t ch = 0; ch < c; ++ch) {
    for (int64_t i = 0; i < n; ++i) {
      frame[static_cast<size_t>(i)] =
          eeg.at(ch, i) * win[static_cast<size_t>(i)];
    }
    fft.run(frame.data(), spec.data());
    std::vector<double> psd(bands.size(), 0.0);
    for (int64_t k = 0; k < fft.bins(); ++k) {
      const double f = static_cast<double>(k) * fs / static_cast<double>(n);
      const double p =
          std::norm(spec[static_cast<size_t>(k)]) *
          ((k == 0 || (n % 2 == 0 && k == nyquist)) ? base : 2.0 * base);
      for (size_t b = 0; b < bands.size(); ++b) {
        if (f >= bands[b].lo && f < bands[b].hi) {
          psd[b] += p;
          break;
        }
      }
    }
    std::vector<double> de = dsp::differential_entropy(psd);
    for (size_t b = 0; b < bands.size(); ++b) {
      out.at(ch, static_cast<int64_t>(b)) = psd[b];
      out.at(ch, static_cast<int64_t>(b + bands.size())) = de[b];
    }
  }
  return out;
}

}  // namespace eegsep::eeg
