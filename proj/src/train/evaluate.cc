// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "train/evaluate.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"
#include "common/text.h"
#include "eeg/adjacency.h"
#include "metrics/si_sdr.h"
#include "metrics/stoi.h"
#include "nn/ops.h"

namespace eegsep::train {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Signals shorter than one correlation segment (or otherwise degenerate for
// the intelligibility front end) score 0 instead of failing the whole report.
metrics::StoiScores safe_stoi(const std::vector<double>& est,
                              const std::vector<double>& ref, double fs) {
  try {
    return metrics::stoi_estoi(est, ref, fs);
  } catch (const LengthError&) {
    return {0.0, 0.0};
  }
}

MetricRow score(const std::vector<double>& est, const data::Scene& scene,
                double mixture_si_sdr) {
  MetricRow row;
  row.si_sdr = metrics::si_sdr_db(est, scene.target);
  row.si_sdri = row.si_sdr - mixture_si_sdr;
  metrics::StoiScores s = safe_stoi(est, scene.target, scene.fs_audio);
  row.stoi = clamp01(s.stoi);
  row.estoi = clamp01(s.estoi);
  return row;
}

void accumulate(MetricRow& mean, MetricRow& std_dev,
                const std::vector<MetricRow>& rows) {
  const double n = static_cast<double>(rows.size());
  if (rows.empty()) return;
  for (const MetricRow& r : rows) {
    mean.si_sdr += r.si_sdr / n;
    mean.si_sdri += r.si_sdri / n;
    mean.stoi += r.stoi / n;
    mean.estoi += r.estoi / n;
  }
  for (const MetricRow& r : rows) {
    std_dev.si_sdr += (r.si_sdr - mean.si_sdr) * (r.si_sdr - mean.si_sdr) / n;
    std_dev.si_sdri += (r.si_sdri - mean.si_sdri) * (r.si_sdri - mean.si_sdri) / n;
    std_dev.stoi += (r.stoi - mean.stoi) * (r.stoi - mean.stoi) / n;
    std_dev.estoi += (r.estoi - mean.estoi) * (r.estoi - mean.estoi) / n;
  }
  std_dev.si_sdr = std::sqrt(std_dev.si_sdr);
  std_dev.si_sdri = std::sqrt(std_dev.si_sdri);
  std_dev.stoi = std::sqrt(std_dev.stoi);
  std_dev.estoi = std::sqrt(std_dev.estoi);
}

std::string row_text(const MetricRow& r) {
  return fmt_full(r.si_sdr) + " " + fmt_full(r.si_sdri) + " " + fmt_full(r.stoi) +
         " " + fmt_full(r.estoi);
}

}  // namespace

MetricReport evaluate_scenes(const std::vector<data::Scene>& scenes,
                             const std::vector<std::string>& ids,
                             const ForwardFn& forward) {
  if (!ids.empty() && ids.size() != scenes.size()) {
    throw DimError("evaluate: ids and scenes differ in length");
  }
  MetricReport report;
  std::vector<MetricRow> model_rows, mixture_rows;
  for (size_t i = 0; i < scenes.size(); ++i) {
    const data::Scene& scene = scenes[i];
    std::vector<double> est = forward(scene);
    if (est.size() != scene.mixture.size()) {
      throw DimError(strprintf("evaluate: estimate has %zu samples, mixture %zu",
                               est.size(), scene.mixture.size()));
    }
    SceneReport sr;
    sr.id = ids.empty() ? strprintf("scene_%04zu", i) : ids[i];
    const double mix_si_sdr = metrics::si_sdr_db(scene.mixture, scene.target);
    sr.model = score(est, scene, mix_si_sdr);
    sr.mixture = score(scene.mixture, scene, mix_si_sdr);  // si_sdri == 0
    model_rows.push_back(sr.model);
    mixture_rows.push_back(sr.mixture);
    report.scenes.push_back(std::move(sr));
  }
  accumulate(report.model_mean, report.model_std, model_rows);
  accumulate(report.mixture_mean, report.mixture_std, mixture_rows);
  return report;
}

MetricReport evaluate_model(const ModelConfig& cfg, nn::ParamRegistry<double>& reg,
                            const std::vector<data::Scene>& scenes,
                            const std::vector<std::string>& ids) {
  const nn::Tensor<double> adj = eeg::default_adjacency(cfg.eeg.electrodes);
  return evaluate_scenes(scenes, ids, [&](const data::Scene& scene) {
    nn::Workspace<double> ws(&reg);
    nn::Var<double> est = model_forward(ws, scene.mixture, scene.eeg.to_tensor(), cfg,
                                        adj, /*training=*/false);
    const nn::Tensor<double>& v = est.value();
    return std::vector<double>(v.data(), v.data() + v.size());
  });
}

std::string report_text(const MetricReport& report) {
  std::string out;
  out += "metric-report 1\n";
  out += "columns si_sdr si_sdri stoi estoi\n";
  for (const SceneReport& sr : report.scenes) {
    out += "scene " + sr.id + " model " + row_text(sr.model) + "\n";
    out += "scene " + sr.id + " mixture " + row_text(sr.mixture) + "\n";
  }
  out += "aggregate model mean " + row_text(report.model_mean) + "\n";
  out += "aggregate model std " + row_text(report.model_std) + "\n";
  out += "aggregate mixture mean " + row_text(report.mixture_mean) + "\n";
  out += "aggregate mixture std " + row_text(report.mixture_std) + "\n";
  return out;
}

}  // namespace eegsep::train
