// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Spectral summary of an EEG recording: per channel, power in the five
// canonical bands (delta/theta/alpha/beta/gamma) plus the differential
// entropy of each, i.e. a C x 10 matrix [PSD(5) | DE(5)].

#ifndef EEGSEP_EEG_FEATURES_H_
#define EEGSEP_EEG_FEATURES_H_

#include "nn/tensor.h"

namespace eegsep {
namespace eeg {

// Width of the per-channel feature row: five band powers + five entropies.
inline constexpr int64_t kFreqFeatureWidth = 10;

// Compute band power + differential entropy features for a (C, T) recording.
// The power estimate is a single-frame periodogram with a symmetric Hann
// window (mirrored halves), so the result is invariant to time reversal of
// the input up to FFT rounding. Requires fs >= 100 (the gamma band needs
// 50 Hz content) and T >= fs/4 (every band must cover at least one bin).
nn::Tensor<double> frequency_features(const nn::Tensor<double>& eeg, double fs);

}  // namespace eeg
}  // namespace eegsep

#endif  // EEGSEP_EEG_FEATURES_H_
