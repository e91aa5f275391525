// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Run configuration: one flat "key value" text file (plus command-line
// overrides) covering the model, the optimizer, the dataset, and run-output
// locations. Unknown keys are rejected, and the fully resolved form is
// echoed into every run directory.

#ifndef EEGSEP_CLI_RUN_CONFIG_H_
#define EEGSEP_CLI_RUN_CONFIG_H_

#include <string>
#include <vector>

#include "data/splits.h"
#include "data/synth.h"
#include "train/model.h"
#include "train/trainer.h"

namespace eegsep::cli {

struct DataConfig {
  std::string dir;  // scene directory containing manifest.txt
  double fs_audio = 8000.0;
  double fs_eeg = 128.0;
  double duration_s = 2.0;
  int64_t eeg_channels = 16;
  double sir_db = 0.0;
  double eeg_snr_db = 10.0;
  double train_frac = 0.75, validation_frac = 0.125, test_frac = 0.125;

  data::SceneConfig scene_config() const;
};

struct RunConfig {
  train::ModelConfig model;
  train::TrainConfig train;
  DataConfig data;
  std::string run_root;        // default: $EEGSEP_RUN_ROOT, else "runs"
  std::string run_name = "run";
};

// Applies one key; throws ConfigError for unknown keys or unparsable values.
void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value);

// Reads `path` ("" = defaults only), then applies "key=value" overrides in
// order. File syntax: one "key value" per line, '#' comments, blank lines
// ignored. All unknown keys in the file are reported in a single error.
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides);

// Every validation failure across the sections, not just the first.
std::vector<std::string> validate_all(const RunConfig& cfg);

// Sorted, full-precision echo of every key; parsing it back reproduces the
// config exactly.
std::string resolved_text(const RunConfig& cfg);

// Loads the scenes named by a manifest split ("train", "validation", "test").
std::vector<data::Scene> load_split(const std::string& dir, const std::string& split,
                                    std::vector<std::string>* ids_out);

}  // namespace eegsep::cli

#endif  // EEGSEP_CLI_RUN_CONFIG_H_
