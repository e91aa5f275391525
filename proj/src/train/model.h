// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// End-to-end model assembly: speech encoder -> EEG encoder -> fusion ->
// mask estimation -> masking -> decoder, plus the canonical configuration
// text used for checkpoint compatibility hashes.

#ifndef EEGSEP_TRAIN_MODEL_H_
#define EEGSEP_TRAIN_MODEL_H_

#include <map>
#include <string>
#include <vector>

#include "codec/codec.h"
#include "eeg/encoder.h"
#include "nn/registry.h"
#include "sep/separator.h"

namespace eegsep::train {

struct ModelConfig {
  codec::CodecConfig codec;
  eeg::EegEncoderConfig eeg;
  sep::SeparatorConfig sep;

  // Per-module validation plus cross-module consistency (the separator and
  // fusion operate on the speech embedding, so channel counts must agree).
  void validate() const;

  // Sorted key=value lines; two configs are checkpoint-compatible iff these
  // match. Training hyperparameters are deliberately excluded.
  std::string canonical_text() const;
  uint64_t hash() const;
};

// Applies "section.key value" to the config. Returns false for unknown keys
// (callers decide whether that is fatal); throws ConfigError on unparsable
// values.
bool apply_model_kv(ModelConfig& cfg, const std::string& key, const std::string& value);

// Rebuilds a config from canonical key/value pairs; unknown keys throw.
ModelConfig model_config_from(const std::map<std::string, std::string>& kv);

// One scene forward pass. `mixture` holds T samples, `eeg_ct` is
// (electrodes, T_e). The estimate is trimmed to exactly T samples, shape
// (1, 1, T). Sub-module failures are rethrown with the failing stage tagged
// in the message.
nn::Var<double> model_forward(nn::Workspace<double>& ws,
                              const std::vector<double>& mixture,
                              const nn::Tensor<double>& eeg_ct,
                              const ModelConfig& cfg,
                              const nn::Tensor<double>& adjacency, bool training);

// Same, with the default fully-connected electrode graph.
nn::Var<double> model_forward(nn::Workspace<double>& ws,
                              const std::vector<double>& mixture,
                              const nn::Tensor<double>& eeg_ct,
                              const ModelConfig& cfg, bool training);

}  // namespace eegsep::train

#endif  // EEGSEP_TRAIN_MODEL_H_
