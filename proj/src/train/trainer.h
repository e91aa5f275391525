// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_TRAIN_TRAINER_H_
#define EEGSEP_TRAIN_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "data/synth.h"
#include "nn/registry.h"
#include "train/adam.h"
#include "train/model.h"

namespace eegsep::train {

struct TrainConfig {
  int64_t epochs = 60;
  int64_t batch_size = 1;
  double lr = 1e-4;
  double lr_decay = 0.5;       // multiplier applied every lr_decay_every epochs
  int64_t lr_decay_every = 20;
  double grad_clip = 5.0;      // global gradient norm ceiling
  double crop_s = 2.0;         // training crop length in seconds
  uint64_t seed = 1;
  int64_t max_steps = 0;       // 0 = no step cap (epochs decide)

  void validate() const;
};

// Piecewise-constant schedule; epoch is 1-based. Defaults give 1e-4 for
// epochs 1-20, 5e-5 for 21-40, 2.5e-5 for 41-60.
double lr_for_epoch(const TrainConfig& cfg, int64_t epoch);

struct StepLog {
  int64_t step = 0;   // 1-based optimizer step
  int64_t epoch = 0;  // 1-based
  double lr = 0.0;
  double loss = 0.0;  // negative SI-SDR, mean over the batch
};

struct EpochLog {
  int64_t epoch = 0;
  double lr = 0.0;
  double train_si_sdr = 0.0;  // mean over the epoch's training crops
  double val_si_sdr = 0.0;    // full-length validation mean (NaN if no val set)
  bool is_best = false;
};

struct TrainResult {
  std::vector<StepLog> steps;
  std::vector<EpochLog> epochs;
  int64_t best_epoch = -1;
  double best_metric = 0.0;
  bool aborted = false;        // non-finite loss or gradient
  std::string abort_reason;
};

struct TrainOutput {
  TrainResult log;
  nn::ParamRegistry<double> params;       // final state (last good on abort)
  nn::ParamRegistry<double> best_params;  // best-validation snapshot
  Adam adam;                              // optimizer state matching `params`
};

// Deterministic given (cfg.seed, scenes): data order, crops, initialization
// and updates are all seeded, so the loss trace reproduces bitwise. On a
// non-finite loss or gradient the loop stops before applying the offending
// update, keeping the last good parameters.
TrainOutput train_model(const ModelConfig& model_cfg, const TrainConfig& cfg,
                        const std::vector<data::Scene>& train_scenes,
                        const std::vector<data::Scene>& val_scenes);

// Mean SI-SDR of full-length eval-mode forwards over `scenes`.
double mean_si_sdr(const ModelConfig& cfg, nn::ParamRegistry<double>& reg,
                   const std::vector<data::Scene>& scenes);

}  // namespace eegsep::train

#endif  // EEGSEP_TRAIN_TRAINER_H_
