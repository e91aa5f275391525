// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_DATA_WAV_H_
#define EEGSEP_DATA_WAV_H_

#include <cstdint>
#include <string>
#include <vector>

namespace eegsep::data {

// Sample container for RIFF/WAVE audio. Channels are stored deinterleaved;
// mono files have one channel, stereo two.
struct Wav {
  double sample_rate = 0.0;
  std::vector<std::vector<double>> channels;

  int64_t frames() const {
    return channels.empty() ? 0 : static_cast<int64_t>(channels[0].size());
  }
};

enum class WavEncoding {
  kPcm16,    // 16-bit signed PCM; round trip within one quantization step
  kFloat32,  // IEEE float; round trip bitwise for float-valued samples
};

// Reads PCM-16 or float32 RIFF/WAVE, mono or stereo. Unknown chunks are
// skipped; malformed headers, unsupported encodings, and truncated payloads
// raise FormatError.
Wav read_wav(const std::string& path);

// Writes mono or stereo audio. PCM-16 clamps to [-1, 1] and rounds to the
// nearest step of 1/32767; float32 narrows each sample to float. Channel
// count outside {1, 2} or mismatched channel lengths raise DimError.
void write_wav(const std::string& path, const Wav& wav, WavEncoding enc);

}  // namespace eegsep::data

#endif  // EEGSEP_DATA_WAV_H_
