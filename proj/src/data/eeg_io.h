// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_DATA_EEG_IO_H_
#define EEGSEP_DATA_EEG_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "nn/tensor.h"

namespace eegsep::data {

// Multichannel EEG record. The on-disk form is a plain-text header (channel
// names, sampling rate, sample count) padded so the raw payload starts on a
// 128-byte boundary, followed by little-endian float32 samples stored
// channel-major: all of channel 0, then channel 1, ...
struct EegRecording {
  double fs = 0.0;
  std::vector<std::string> channel_names;
  int64_t samples = 0;
  std::vector<float> payload;  // channel_names.size() * samples values

  int64_t channels() const { return static_cast<int64_t>(channel_names.size()); }

  // (channels, samples) tensor view for the model front end.
  nn::Tensor<double> to_tensor() const;

  // Builds a recording from a (channels, samples) tensor; values are
  // narrowed to float32, which is the container's native precision.
  static EegRecording from_tensor(const nn::Tensor<double>& x, double fs,
                                  std::vector<std::string> names);
};

// Round trip is bitwise: read_eeg(write_eeg(r)) returns r's payload exactly.
// Truncated or oversized payloads, bad headers, and inconsistent channel
// counts raise FormatError.
void write_eeg(const std::string& path, const EegRecording& rec);
EegRecording read_eeg(const std::string& path);

}  // namespace eegsep::data

#endif  // EEGSEP_DATA_EEG_IO_H_
