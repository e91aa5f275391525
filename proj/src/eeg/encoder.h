// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// EEG encoder: multi-scale temporal convolutions and five-band spectral
// features feed two graph layers over the electrode graph (a temporal view
// and a frequency view). The views are concatenated per electrode, tagged
// with a positional encoding over the electrode ordinal, mixed by softmax
// self-attention across electrodes, projected to the embedding width, and
// linearly interpolated along time to match the speech frame count.

#ifndef EEGSEP_EEG_ENCODER_H_
#define EEGSEP_EEG_ENCODER_H_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "common/error.h"
#include "eeg/adjacency.h"
#include "eeg/features.h"
#include "nn/attention.h"
#include "nn/ops.h"
#include "nn/ops_conv.h"
#include "nn/ops_norm.h"
#include "nn/registry.h"

namespace eegsep {
namespace eeg {

struct EegEncoderConfig {
  int64_t electrodes = 16;        // C: EEG channel count
  double fs = 128.0;              // EEG sample rate, Hz
  int64_t scale_filters = 8;      // filters per temporal scale branch
  int64_t temporal_features = 22; // per-electrode width after the 1x1 merge
  int64_t stride = 4;             // temporal stride shared by all branches
  int64_t heads = 4;              // electrode self-attention heads
  int64_t out_channels = 64;      // embedding width C_EEG

  // Branch kernel widths: fs/2, fs/4, fs/8, fs/16, fs/32 samples (rounded).
  std::vector<int64_t> kernel_widths() const {
    std::vector<int64_t> w;
    double width = fs;
    for (int k = 0; k < 5; ++k) {
      width *= 0.5;
      w.push_back(std::max<int64_t>(1, std::llround(width)));
    }
    return w;
  }

  // Per-electrode feature width after concatenating the temporal view with
  // the ten spectral features.
  int64_t feature_width() const {
    return temporal_features + kFreqFeatureWidth;
  }

  void validate() const {
    if (electrodes < 1) throw ConfigError("eeg encoder: electrodes >= 1");
    if (fs < 100.0) {
      throw ConfigError("eeg encoder: fs >= 100 Hz required (gamma band)");
    }
    if (scale_filters < 1) throw ConfigError("eeg encoder: scale_filters >= 1");
    if (temporal_features < 1) {
      throw ConfigError("eeg encoder: temporal_features >= 1");
    }
    if (stride < 1) throw ConfigError("eeg encoder: stride >= 1");
    if (out_channels < 1) throw ConfigError("eeg encoder: out_channels >= 1");
    if (heads < 1 || feature_width() % heads != 0) {
      throw ConfigError("eeg encoder: heads must divide the concatenated "
                        "feature width " + std::to_string(feature_width()));
    }
    std::vector<int64_t> w = kernel_widths();
    for (size_t k = 1; k < w.size(); ++k) {
      if (w[k] >= w[k - 1]) {
        throw ConfigError("eeg encoder: kernel widths must strictly decrease");
      }
    }
    // With kernel >= stride, "same" padding is never negative.
    if (stride > w.back()) {
      throw ConfigError("eeg encoder: stride " + std::to_string(stride) +
                        " exceeds the narrowest kernel width " +
                        std::to_string(w.back()));
    }
  }
};

// Sinusoidal positional-encoding table over node ordinals: (count, width).
template <typename T>
nn::Tensor<T> positional_encoding(int64_t count, int64_t width) {
  nn::Tensor<T> pe({count, width});
  for (int64_t p = 0; p < count; ++p) {
    for (int64_t i = 0; i < width; ++i) {
      const double angle =
          static_cast<double>(p) /
          std::pow(10000.0, static_cast<double>(2 * (i / 2)) /
                                static_cast<double>(width));
      pe.at(p, i) = static_cast<T>(i % 2 == 0 ? std::sin(angle)
                                              : std::cos(angle));
    }
  }
  return pe;
}

// One graph layer over node features x (..., C, D) with adjacency `a`
// (C x C, symmetric, nonnegative):
//   out = eps(D^{-1/2} A D^{-1/2} eps(x W1) W2 + x)
// where eps is batch-norm + ELU. The residual fixes the output width to D.
template <typename T>
nn::Var<T> gcn_layer(nn::Workspace<T>& ws, nn::Var<T> x,
                     const nn::Tensor<T>& a, bool training,
                     const std::string& prefix) {
  if (x.rank() < 2) throw DimError("gcn_layer: rank >= 2 required");
  const nn::Shape xs = x.shape();  // copy: x.shape() ref dies on next emit
  const int64_t c = xs[xs.size() - 2];
  const int64_t d = xs[xs.size() - 1];
  if (a.rank() != 2 || a.dim(0) != c || a.dim(1) != c) {
    throw DimError("gcn_layer: adjacency must be " + std::to_string(c) + "x" +
                   std::to_string(c) + ", got " + nn::shape_str(a.shape()));
  }
  nn::Tensor<T> norm =
      normalized_adjacency(a.template cast<double>()).template cast<T>();

  nn::Var<T> w1 = ws.param_uniform(prefix + ".w1", {d, d}, d);
  nn::Var<T> w2 = ws.param_uniform(prefix + ".w2", {d, d}, d);
  nn::Var<T> g1 = ws.param_const(prefix + ".bn1.gamma", {d}, T(1));
  nn::Var<T> b1 = ws.param_const(prefix + ".bn1.beta", {d}, T(0));
  nn::Var<T> g2 = ws.param_const(prefix + ".bn2.gamma", {d}, T(1));
  nn::Var<T> b2 = ws.param_const(prefix + ".bn2.beta", {d}, T(0));
  nn::Tensor<T>* m1 = &ws.buffer(prefix + ".bn1.run_mean", {d}, T(0));
  nn::Tensor<T>* v1 = &ws.buffer(prefix + ".bn1.run_var", {d}, T(1));
  nn::Tensor<T>* m2 = &ws.buffer(prefix + ".bn2.run_mean", {d}, T(0));
  nn::Tensor<T>* v2 = &ws.buffer(prefix + ".bn2.run_var", {d}, T(1));

  const size_t feat_axis = xs.size() - 1;
  nn::Var<T> h = nn::bn_elu(nn::matmul_lastdim(x, w1), g1, b1, feat_axis,
                            training, m1, v1);
  nn::Var<T> mixed = nn::adjacency_mix(h, norm);
  nn::Var<T> y = nn::add(nn::matmul_lastdim(mixed, w2), x);
  return nn::bn_elu(y, g2, b2, feat_axis, training, m2, v2);
}

// Frames produced along time by the strided multi-scale branches.
inline int64_t multiscale_frames(int64_t t, const EegEncoderConfig& cfg) {
  return (t + cfg.stride - 1) / cfg.stride;  // ceil(t / stride), "same" pad
}

// Multi-scale temporal view: five per-electrode conv branches (descending
// kernel widths, shared stride, "same" padding) each through batch-norm +
// ELU, concatenated along filters, then merged by a 1x1 conv to
// `temporal_features` per electrode. In: (B, C, T). Out: (B, T', C, D_T).
template <typename T>
nn::Var<T> multiscale_temporal(nn::Workspace<T>& ws, nn::Var<T> x,
                               const EegEncoderConfig& cfg, bool training,
                               const std::string& prefix = "eeg.ms") {
  cfg.validate();
  if (x.rank() != 3 || x.dim(1) != cfg.electrodes) {
    throw DimError("multiscale_temporal expects (B, " +
                   std::to_string(cfg.electrodes) + ", T), got " +
                   nn::shape_str(x.shape()));
  }
  const int64_t b = x.dim(0);
  const int64_t c = x.dim(1);
  const int64_t t = x.dim(2);
  const std::vector<int64_t> widths = cfg.kernel_widths();
  if (t < widths[0]) {
    throw LengthError("multiscale_temporal: EEG too short (" +
                      std::to_string(t) + " samples < widest kernel " +
                      std::to_string(widths[0]) + ")");
  }
  const int64_t tp = multiscale_frames(t, cfg);
  const int64_t f = cfg.scale_filters;

  // Electrodes are independent: fold them into the batch axis.
  nn::Var<T> x1 = nn::reshape(x, {b * c, 1, t});
  std::vector<nn::Var<T>> branches;
  for (size_t k = 0; k < widths.size(); ++k) {
    const int64_t kw = widths[k];
    const int64_t pad_total = (tp - 1) * cfg.stride + kw - t;
    const int64_t pad_left = pad_total / 2;
    const std::string bp = prefix + ".s" + std::to_string(k + 1);
    nn::Var<T> w = ws.param_uniform(bp + ".w", {f, 1, kw}, kw);
    nn::Var<T> conv = nn::conv1d(x1, w, cfg.stride, pad_left,
                                 pad_total - pad_left);
    nn::Var<T> g = ws.param_const(bp + ".bn.gamma", {f}, T(1));
    nn::Var<T> be = ws.param_const(bp + ".bn.beta", {f}, T(0));
    nn::Tensor<T>* rm = &ws.buffer(bp + ".bn.run_mean", {f}, T(0));
    nn::Tensor<T>* rv = &ws.buffer(bp + ".bn.run_var", {f}, T(1));
    branches.push_back(nn::bn_elu(conv, g, be, /*channel_axis=*/1, training,
                                  rm, rv));
  }
  nn::Var<T> cat = nn::concat(branches, /*axis=*/1);  // (B*C, 5F, T')
  nn::Var<T> wr = ws.param_uniform(prefix + ".merge.w",
                                   {cfg.temporal_features, 5 * f, 1}, 5 * f);
  nn::Var<T> br = ws.param_const(prefix + ".merge.b",
                                 {cfg.temporal_features}, T(0));
  nn::Var<T> merged = nn::add_channel_bias(
      nn::conv1d(cat, wr, /*stride=*/1, 0, 0), br);  // (B*C, D_T, T')
  nn::Var<T> unfolded = nn::reshape(merged, {b, c, cfg.temporal_features, tp});
  return nn::permute(unfolded, {0, 3, 1, 2});  // (B, T', C, D_T)
}

// Full EEG encoder. Raw recording (B, C, T) -> embedding (B, C_EEG, S) with
// S = out_frames (the speech embedding frame count). `a` is the electrode
// adjacency (C x C); pass default_adjacency(C) when no montage is known.
template <typename T>
nn::Var<T> encode_eeg(nn::Workspace<T>& ws, const nn::Tensor<T>& eeg,
                      const EegEncoderConfig& cfg, const nn::Tensor<T>& a,
                      int64_t out_frames, bool training,
                      const std::string& prefix = "eeg") {
  cfg.validate();
  if (eeg.rank() != 3) {
    throw DimError("encode_eeg expects (B, C, T), got " +
                   nn::shape_str(eeg.shape()));
  }
  if (eeg.dim(1) != cfg.electrodes) {
    throw ConfigError("encode_eeg: recording has " + std::to_string(eeg.dim(1)) +
                      " channels but the encoder is configured for " +
                      std::to_string(cfg.electrodes));
  }
  if (out_frames < 1) throw DimError("encode_eeg: out_frames >= 1");
  const int64_t b = eeg.dim(0);
  const int64_t c = cfg.electrodes;
  const int64_t t = eeg.dim(2);
  const int64_t tp = multiscale_frames(t, cfg);
  const int64_t dw = cfg.feature_width();

  // Temporal view -> graph layer over electrodes, per time step.
  nn::Var<T> et = multiscale_temporal(ws, ws.input(eeg), cfg, training,
                                      prefix + ".ms");
  nn::Var<T> gt = gcn_layer(ws, et, a, training, prefix + ".t_gcn");

  // Frequency view (band powers + entropies; constant along time).
  nn::Tensor<T> ef({b, c, kFreqFeatureWidth});
  for (int64_t bi = 0; bi < b; ++bi) {
    nn::Tensor<double> one({c, t});
    for (int64_t i = 0; i < c * t; ++i)
      one[i] = static_cast<double>(eeg[bi * c * t + i]);
    nn::Tensor<double> feat = frequency_features(one, cfg.fs);
    for (int64_t i = 0; i < feat.size(); ++i)
      ef[bi * feat.size() + i] = static_cast<T>(feat[i]);
  }
  nn::Var<T> gf = gcn_layer(ws, ws.input(ef), a, training, prefix + ".f_gcn");
  nn::Var<T> gf_t = nn::tile_axis1(gf, tp);  // (B, T', C, 10)

  // Concatenate views, add the electrode positional code.
  nn::Var<T> zc = nn::concat<T>({gt, gf_t}, /*axis=*/3);  // (B, T', C, D_T+10)
  nn::Var<T> z = nn::add_bcast_trailing(zc, positional_encoding<T>(c, dw));

  // Softmax self-attention across electrodes for every (batch, time) slab,
  // with a residual path.
  nn::Var<T> wq = ws.param_uniform(prefix + ".attn.wq", {dw, dw}, dw);
  nn::Var<T> wk = ws.param_uniform(prefix + ".attn.wk", {dw, dw}, dw);
  nn::Var<T> wv = ws.param_uniform(prefix + ".attn.wv", {dw, dw}, dw);
  nn::Var<T> wo = ws.param_uniform(prefix + ".attn.wo", {dw, dw}, dw);
  nn::Var<T> bq = ws.param_const(prefix + ".attn.bq", {dw}, T(0));
  nn::Var<T> bk = ws.param_const(prefix + ".attn.bk", {dw}, T(0));
  nn::Var<T> bv = ws.param_const(prefix + ".attn.bv", {dw}, T(0));
  nn::Var<T> bo = ws.param_const(prefix + ".attn.bo", {dw}, T(0));
  nn::Var<T> slabs = nn::reshape(z, {b * tp, c, dw});
  std::vector<nn::Var<T>> attended;
  attended.reserve(static_cast<size_t>(b * tp));
  for (int64_t s = 0; s < b * tp; ++s) {
    nn::Var<T> slice =
        nn::reshape(nn::narrow(slabs, /*axis=*/0, s, 1), {c, dw});
    nn::Var<T> att = nn::multihead_self_attention(slice, wq, wk, wv, wo, bq,
                                                  bk, bv, bo, cfg.heads);
    attended.push_back(nn::reshape(nn::add(slice, att), {int64_t{1}, c, dw}));
  }
  nn::Var<T> mixed = nn::concat(attended, /*axis=*/0);  // (B*T', C, D)

  // Flatten electrodes x features, project to C_EEG, align time to S.
  nn::Var<T> flat = nn::reshape(mixed, {b, tp, c * dw});
  nn::Var<T> wp = ws.param_uniform(prefix + ".proj.w",
                                   {c * dw, cfg.out_channels}, c * dw);
  nn::Var<T> bp = ws.param_const(prefix + ".proj.b", {cfg.out_channels}, T(0));
  nn::Var<T> proj = nn::add_lastdim_bias(nn::matmul_lastdim(flat, wp), bp);
  nn::Var<T> chann = nn::permute(proj, {0, 2, 1});  // (B, C_EEG, T')
  return nn::interp_time(chann, out_frames);        // (B, C_EEG, S)
}

}  // namespace eeg
}  // namespace eegsep

#endif  // EEGSEP_EEG_ENCODER_H_
