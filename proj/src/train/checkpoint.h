// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Checkpoint container: plain-text header (config key/values, tensor names
// and shapes, config hash) padded to a 128-byte boundary, followed by
// little-endian float32 payloads in header order. Self-contained: the model
// can be rebuilt from the stored config alone.

#ifndef EEGSEP_TRAIN_CHECKPOINT_H_
#define EEGSEP_TRAIN_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <string>

#include "nn/registry.h"
#include "train/adam.h"
#include "train/model.h"

namespace eegsep::train {

struct Checkpoint {
  uint64_t config_hash = 0;  // hash of the stored model config
  int64_t epoch = 0;
  int64_t adam_steps = 0;
  std::map<std::string, std::string> config;  // canonical model config
  std::map<std::string, nn::Tensor<double>> params;
  std::map<std::string, nn::Tensor<double>> buffers;
  std::map<std::string, nn::Tensor<double>> adam_m, adam_v;
};

// Captures the current parameters, persistent buffers, and (optionally)
// optimizer moments.
Checkpoint snapshot(const ModelConfig& cfg, const nn::ParamRegistry<double>& reg,
                    const Adam* adam, int64_t epoch);

// Values are narrowed to float32 on write; a reloaded model therefore
// reproduces forward outputs to single-precision accuracy (1e-6 relative).
void write_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Verifies the stored hash against the stored config text (tamper check)
// and the payload size against the header. FormatError on any mismatch.
Checkpoint read_checkpoint(const std::string& path);

// Installs parameters and buffers into a registry (overwriting or creating
// by name) and optimizer moments into `adam` when non-null.
void apply_checkpoint(const Checkpoint& ckpt, nn::ParamRegistry<double>* reg,
                      Adam* adam);

// Rebuilds the model configuration stored in the checkpoint.
ModelConfig config_from_checkpoint(const Checkpoint& ckpt);

}  // namespace eegsep::train

#endif  // EEGSEP_TRAIN_CHECKPOINT_H_
