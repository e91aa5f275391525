// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Canonical EEG band power and differential entropy features.

#ifndef EEGSEP_DSP_BANDS_H_
#define EEGSEP_DSP_BANDS_H_

#include <array>
#include <string>
#include <vector>

#include "dsp/stft.h"

namespace eegsep::dsp {

struct BandDef {
  std::string name;
  double lo = 0;  // Hz, inclusive
  double hi = 0;  // Hz, exclusive
};

// delta 0-4, theta 4-8, alpha 8-12, beta 12-30, gamma 30-50 Hz.
const std::array<BandDef, 5>& canonical_bands();

// Welch-style band power: per-bin one-sided periodogram |X|^2 scaled by
// 1/(fs * sum(w^2)) (doubled off DC/Nyquist), averaged over frames, summed
// over the bins with lo <= f < hi. Bands that partition the spectrum
// therefore decompose the total power additively.
std::vector<double> band_power(const Spectrogram& spec,
                               const std::vector<BandDef>& bands);

inline constexpr double kDeFloor = 1e-10;

// Gaussian closed form per band: 0.5 * ln(2*pi*e * max(p, floor)).
std::vector<double> differential_entropy(const std::vector<double>& power);

}  // namespace eegsep::dsp

#endif  // EEGSEP_DSP_BANDS_H_
