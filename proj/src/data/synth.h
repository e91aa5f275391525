// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_DATA_SYNTH_H_
#define EEGSEP_DATA_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "data/eeg_io.h"

namespace eegsep::data {

enum class Ear { kLeft, kRight };

struct SceneConfig {
  double fs_audio = 8000.0;
  double fs_eeg = 128.0;
  double duration_s = 2.0;
  int64_t eeg_channels = 16;
  double sir_db = 0.0;      // target-to-interferer energy ratio of the mixture
  double eeg_snr_db = 10.0; // envelope-tracking component vs additive noise, per channel

  // duration >= 1 s, eeg_channels >= 2, positive rates; ConfigError otherwise.
  void validate() const;
};

// One synthetic trial: two distinct pseudo-speech streams, their sum at the
// configured SIR, and surrogate EEG whose channels track the target's
// amplitude envelope (plus a 10 Hz oscillation and noise). The EEG is a
// labeled stand-in for listening data, not a physiological simulation.
struct Scene {
  uint64_t seed = 0;
  double fs_audio = 0.0;
  std::vector<double> mixture, target, interferer;  // shared length
  EegRecording eeg;                                 // duration matches the audio
  Ear attended_ear = Ear::kLeft;
};

// Deterministic per (seed, cfg): same call, bitwise-identical scene.
// Invariants: mixture[i] == target[i] + interferer[i] exactly (the mixture is
// formed by sample-wise addition after SIR scaling); measured SIR equals
// cfg.sir_db up to rounding.
Scene synth_scene(uint64_t seed, const SceneConfig& cfg);

// On-disk layout under dir/: stem.mix.wav, stem.target.wav, stem.interf.wav
// (float32 WAV), stem.eeg, and stem.meta (seed, attended ear). Audio is
// narrowed to float32 by the container.
void save_scene(const std::string& dir, const std::string& stem, const Scene& scene);
Scene load_scene(const std::string& dir, const std::string& stem);

}  // namespace eegsep::data

#endif  // EEGSEP_DATA_SYNTH_H_
