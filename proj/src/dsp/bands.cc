// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dsp/bands.h"

#include <cmath>

#include "common/error.h"

namespace eegsep::dsp {

const std::array<BandDef, 5>& canonical_bands() {
  static const std::array<BandDef, 5> bands = {{{"delta", 0.0, 4.0},
                                               {"theta", 4.0, 8.0},
                                               {"alpha", 8.0, 12.0},
                                               {"beta", 12.0, 30.0},
                                               {"gamma", 30.0, 50.0}}};
  return bands;
}

std::vector<double> band_power(const Spectrogram& spec,
                               const std::vector<BandDef>& bands) {
  if (spec.frames < 1) throw LengthError("band_power: empty spectrogram");
  double max_hi = 0;
  for (const BandDef& b : bands) max_hi = std::max(max_hi, b.hi);
  if (spec.sample_rate < 2.0 * max_hi) {
    throw ConfigError("band_power: sample rate below 2x highest band edge");
  }
  // One-sided periodogram scaling; constant per bin so that disjoint bands
  // decompose the total power additively.
  std::vector<double> win = hann_window(spec.window_len);
  double wss = 0;
  for (double w : win) wss += w * w;
  double base = 1.0 / (spec.sample_rate * wss);
  int64_t nyquist = spec.window_len / 2;

  std::vector<double> out(bands.size(), 0.0);
  for (size_t bi = 0; bi < bands.size(); ++bi) {
    const BandDef& band = bands[bi];
    int64_t n_bins = 0;
    double acc = 0;
    for (int64_t k = 0; k < spec.bins; ++k) {
      double f = spec.bin_hz(k);
      if (f < band.lo || f >= band.hi) continue;
      ++n_bins;
      double scale = (k == 0 || k == nyquist) ? base : 2.0 * base;
      for (int64_t fr = 0; fr < spec.frames; ++fr) acc += scale * std::norm(spec.at(fr, k));
    }
    if (n_bins == 0) {
      throw ConfigError("band_power: band '" + band.name + "' covers no bins");
    }
    out[bi] = acc / static_cast<double>(spec.frames);
  }
  return out;
}

std::vector<double> differential_entropy(const std::vector<double>& power) {
  std::vector<double> out(power.size());
  const double two_pi_e = 2.0 * M_PI * M_E;
  for (size_t i = 0; i < power.size(); ++i) {
    out[i] = 0.5 * std::log(two_pi_e * std::max(power[i], kDeFloor));
  }
  return out;
}

}  // namespace eegsep::dsp
