// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_TRAIN_EVALUATE_H_
#define EEGSEP_TRAIN_EVALUATE_H_

#include <functional>
#include <string>
#include <vector>

#include "data/synth.h"
#include "nn/registry.h"
#include "train/model.h"

namespace eegsep::train {

struct MetricRow {
  double si_sdr = 0.0;   // dB, capped at +60
  double si_sdri = 0.0;  // improvement over the unprocessed mixture
  double stoi = 0.0;     // clamped to [0, 1] for reporting
  double estoi = 0.0;    // clamped to [0, 1] for reporting
};

struct SceneReport {
  std::string id;
  MetricRow model;    // metrics of the estimate
  MetricRow mixture;  // baseline: metrics of the unprocessed mixture
};

struct MetricReport {
  std::vector<SceneReport> scenes;
  MetricRow model_mean, model_std;      // exact mean / population std
  MetricRow mixture_mean, mixture_std;
};

// Estimate producer for one scene; must return mixture-length samples.
using ForwardFn = std::function<std::vector<double>(const data::Scene&)>;

// Scores every scene against its target and aggregates. `ids` labels the
// rows; when empty, scenes are labeled by index. Degenerate intelligibility
// inputs score 0 rather than raising.
MetricReport evaluate_scenes(const std::vector<data::Scene>& scenes,
                             const std::vector<std::string>& ids,
                             const ForwardFn& forward);

// Convenience wrapper: eval-mode model forward with the default electrode
// graph.
MetricReport evaluate_model(const ModelConfig& cfg, nn::ParamRegistry<double>& reg,
                            const std::vector<data::Scene>& scenes,
                            const std::vector<std::string>& ids);

// Stable plain-text rendering (full-precision values), suitable for diffing
// across runs.
std::string report_text(const MetricReport& report);

}  // namespace eegsep::train

#endif  // EEGSEP_TRAIN_EVALUATE_H_
