// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "train/trainer.h"

#include <cmath>
#include <limits>
#include <utility>

#include "common/error.h"
#include "common/rng.h"
#include "common/text.h"
#include "eeg/adjacency.h"
#include "metrics/si_sdr.h"
#include "nn/ops.h"

namespace eegsep::train {
namespace {

// Seeds one stream per epoch so reordering epochs (or resuming) cannot
// silently reuse draws from another epoch.
Rng epoch_stream(uint64_t seed, int64_t epoch) {
  uint64_t h = fnv1a64(&epoch, sizeof epoch, seed ^ 0x65706f6368ULL);
  return Rng(h);
}

struct Crop {
  std::vector<double> mixture, target;
  nn::Tensor<double> eeg;
};

// Aligned audio/EEG window. Offsets are drawn in samples at audio rate and
// mapped proportionally to the EEG rate.
Crop make_crop(const data::Scene& scene, double crop_s, Rng& rng) {
  const int64_t t = static_cast<int64_t>(scene.mixture.size());
  const double fs = scene.fs_audio;
  int64_t want = static_cast<int64_t>(std::llround(crop_s * fs));
  if (want < 1 || want > t) want = t;
  const int64_t off = want < t ? static_cast<int64_t>(rng.index(
                                     static_cast<uint64_t>(t - want + 1)))
                               : 0;

  Crop crop;
  crop.mixture.assign(scene.mixture.begin() + off, scene.mixture.begin() + off + want);
  crop.target.assign(scene.target.begin() + off, scene.target.begin() + off + want);

  const nn::Tensor<double> full = scene.eeg.to_tensor();
  const int64_t te_total = full.shape()[1];
  const double fs_e = scene.eeg.fs;
  int64_t len_e = static_cast<int64_t>(std::llround(static_cast<double>(want) * fs_e / fs));
  if (len_e > te_total) len_e = te_total;
  if (len_e < 1) len_e = 1;
  int64_t off_e = static_cast<int64_t>(std::llround(static_cast<double>(off) * fs_e / fs));
  if (off_e + len_e > te_total) off_e = te_total - len_e;

  crop.eeg = nn::Tensor<double>({full.shape()[0], len_e});
  for (int64_t c = 0; c < full.shape()[0]; ++c) {
    for (int64_t i = 0; i < len_e; ++i) crop.eeg.at(c, i) = full.at(c, off_e + i);
  }
  return crop;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(lr > 0)) throw ConfigError("lr must be positive");
  if (!(lr_decay > 0)) throw ConfigError("lr_decay must be positive");
  if (lr_decay_every < 1) throw ConfigError("lr_decay_every must be >= 1");
  if (!(grad_clip > 0)) throw ConfigError("grad_clip must be positive");
  if (!(crop_s > 0)) throw ConfigError("crop_s must be positive");
  if (max_steps < 0) throw ConfigError("max_steps must be >= 0");
}

double lr_for_epoch(const TrainConfig& cfg, int64_t epoch) {
  if (epoch < 1) throw ValueError("epoch is 1-based");
  int64_t decays = (epoch - 1) / cfg.lr_decay_every;
  return cfg.lr * std::pow(cfg.lr_decay, static_cast<double>(decays));
}

double mean_si_sdr(const ModelConfig& cfg, nn::ParamRegistry<double>& reg,
                   const std::vector<data::Scene>& scenes) {
  if (scenes.empty()) return std::numeric_limits<double>::quiet_NaN();
  const nn::Tensor<double> adj = eeg::default_adjacency(cfg.eeg.electrodes);
  double sum = 0.0;
  for (const data::Scene& scene : scenes) {
    nn::Workspace<double> ws(&reg);
    nn::Var<double> est = model_forward(ws, scene.mixture, scene.eeg.to_tensor(), cfg,
                                        adj, /*training=*/false);
    const double* e = est.value().data();
    sum += metrics::si_sdr_db(e, scene.target.data(),
                              static_cast<int64_t>(scene.target.size()));
  }
  return sum / static_cast<double>(scenes.size());
}

TrainOutput train_model(const ModelConfig& model_cfg, const TrainConfig& cfg,
                        const std::vector<data::Scene>& train_scenes,
                        const std::vector<data::Scene>& val_scenes) {
  model_cfg.validate();
  cfg.validate();
  if (train_scenes.empty()) throw ConfigError("training requires a non-empty train split");

  TrainOutput out{TrainResult{}, nn::ParamRegistry<double>(cfg.seed),
                  nn::ParamRegistry<double>(cfg.seed), Adam{}};
  nn::ParamRegistry<double>& reg = out.params;
  const nn::Tensor<double> adj = eeg::default_adjacency(model_cfg.eeg.electrodes);

  out.log.best_metric = -std::numeric_limits<double>::infinity();
  int64_t step = 0;
  bool stop = false;

  for (int64_t epoch = 1; epoch <= cfg.epochs && !stop; ++epoch) {
    const double lr = lr_for_epoch(cfg, epoch);
    Rng rng = epoch_stream(cfg.seed, epoch);

    std::vector<size_t> order(train_scenes.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.index(i)]);
    }

    double epoch_loss_sum = 0.0;
    int64_t epoch_crops = 0;

    for (size_t pos = 0; pos < order.size() && !stop;) {
      const size_t batch_end =
          std::min(order.size(), pos + static_cast<size_t>(cfg.batch_size));
      const int64_t batch_n = static_cast<int64_t>(batch_end - pos);
      reg.zero_grads();
      // Training-mode forwards update normalization buffers before the loss
      // is known; keep a copy so an aborted batch leaves no trace.
      const std::map<std::string, nn::Tensor<double>> buffers_before = reg.buffers();
      double batch_loss = 0.0;

      for (; pos < batch_end; ++pos) {
        const data::Scene& scene = train_scenes[order[pos]];
        Crop crop = make_crop(scene, cfg.crop_s, rng);
        double loss_val = 0.0;
        // The tape raises ValueError the moment any op emits a non-finite
        // value; treat that the same as a non-finite loss.
        try {
          nn::Workspace<double> ws(&reg);
          nn::Var<double> est = model_forward(ws, crop.mixture, crop.eeg, model_cfg,
                                              adj, /*training=*/true);
          nn::Tensor<double> ref({1, 1, static_cast<int64_t>(crop.target.size())},
                                 crop.target);
          nn::Var<double> loss = metrics::si_sdr_loss(est, ref);
          loss_val = loss.value()[0];
          if (std::isfinite(loss_val)) ws.backward(loss);
        } catch (const ValueError& e) {
          out.log.aborted = true;
          out.log.abort_reason = strprintf(
              "numeric failure at step %lld (epoch %lld): %s; parameters kept at "
              "the last completed update",
              static_cast<long long>(step + 1), static_cast<long long>(epoch),
              e.what());
          reg.buffers() = buffers_before;
          stop = true;
          break;
        }
        if (!std::isfinite(loss_val)) {
          out.log.aborted = true;
          out.log.abort_reason = strprintf(
              "non-finite loss %g at step %lld (epoch %lld); parameters kept at the "
              "last completed update",
              loss_val, static_cast<long long>(step + 1), static_cast<long long>(epoch));
          reg.buffers() = buffers_before;
          stop = true;
          break;
        }
        batch_loss += loss_val;
      }
      if (stop) break;

      const double grad_norm = reg.grad_norm();
      if (!std::isfinite(grad_norm)) {
        out.log.aborted = true;
        out.log.abort_reason = strprintf(
            "non-finite gradient norm at step %lld (epoch %lld); parameters kept at "
            "the last completed update",
            static_cast<long long>(step + 1), static_cast<long long>(epoch));
        reg.buffers() = buffers_before;
        break;
      }
      if (batch_n > 1) reg.scale_grads(1.0 / static_cast<double>(batch_n));
      const double effective_norm =
          batch_n > 1 ? grad_norm / static_cast<double>(batch_n) : grad_norm;
      if (effective_norm > cfg.grad_clip) {
        reg.scale_grads(cfg.grad_clip / effective_norm);
      }
      out.adam.step(reg, lr);
      ++step;

      const double mean_loss = batch_loss / static_cast<double>(batch_n);
      out.log.steps.push_back({step, epoch, lr, mean_loss});
      epoch_loss_sum += batch_loss;
      epoch_crops += batch_n;
      if (cfg.max_steps > 0 && step >= cfg.max_steps) stop = true;
    }
    if (out.log.aborted) break;

    EpochLog el;
    el.epoch = epoch;
    el.lr = lr;
    el.train_si_sdr =
        epoch_crops > 0 ? -epoch_loss_sum / static_cast<double>(epoch_crops)
                        : std::numeric_limits<double>::quiet_NaN();
    el.val_si_sdr = mean_si_sdr(model_cfg, reg, val_scenes);
    const double metric = val_scenes.empty() ? el.train_si_sdr : el.val_si_sdr;
    if (metric > out.log.best_metric) {
      out.log.best_metric = metric;
      out.log.best_epoch = epoch;
      el.is_best = true;
      out.best_params = reg;  // snapshot parameters and buffers
    }
    out.log.epochs.push_back(el);
  }

  if (out.log.best_epoch < 0) out.best_params = reg;
  return out;
}

}  // namespace eegsep::train
