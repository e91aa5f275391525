// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Short-time objective intelligibility measures. Both metrics resample to
// 10 kHz, drop silent frames (40 dB below the loudest clean frame), build a
// 15-band third-octave magnitude spectrogram (256-sample Hann frames, 512
// FFT, 50% overlap, bands from 150 Hz), and correlate clean vs processed
// over sliding 30-frame segments:
//   stoi  - per-band temporal correlation with clip-normalized processed
//           envelopes (beta = -15 dB);
//   estoi - row- then column-normalized spectrogram segment correlation,
//           no clipping.
// Raw scores land in [-1, 1]; callers clamp to [0, 1] for reports.

#ifndef EEGSEP_METRICS_STOI_H_
#define EEGSEP_METRICS_STOI_H_

#include <vector>

namespace eegsep {
namespace metrics {

struct StoiScores {
  double stoi = 0.0;
  double estoi = 0.0;
};

// Compute both measures in one pass. `est` is the processed signal, `ref`
// the clean reference; equal lengths required. Throws LengthError when the
// retained signal is too short for one 30-frame segment.
StoiScores stoi_estoi(const std::vector<double>& est,
                      const std::vector<double>& ref, double fs);

inline double stoi(const std::vector<double>& est,
                   const std::vector<double>& ref, double fs) {
  return stoi_estoi(est, ref, fs).stoi;
}

inline double estoi(const std::vector<double>& est,
                    const std::vector<double>& ref, double fs) {
  return stoi_estoi(est, ref, fs).estoi;
}

}  // namespace metrics
}  // namespace eegsep

#endif  // EEGSEP_METRICS_STOI_H_
