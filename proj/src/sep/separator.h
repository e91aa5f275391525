// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Mask-estimation separator. The fused speech+EEG feature map runs through R
// stacked pairs of (attention block, memory block):
//   attention block:  O = X + ConvM(sigmoid((U * A V) * A U))
//     where U, V are 1x1-conv projections of X and A is one shared attention
//     action per block - chunked local softmax attention plus global
//     linearized attention, summed;
//   memory block:     O = X + U * DilatedFSMN(V)
//     where the FSMN stacks dilated depthwise stages with dense
//     (concatenative) skips, widening the receptive field exponentially.
// A final 1x1 conv + ReLU head emits the nonnegative mask M, applied to the
// speech embedding elementwise.

#ifndef EEGSEP_SEP_SEPARATOR_H_
#define EEGSEP_SEP_SEPARATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "common/error.h"
#include "nn/attention.h"
#include "nn/ops.h"
#include "nn/ops_conv.h"
#include "nn/registry.h"

namespace eegsep {
namespace sep {

struct SeparatorConfig {
  int64_t channels = 128;   // C: feature-map width (codec embedding width)
  int64_t blocks = 6;       // R: (attention, memory) pair count
  int64_t chunk = 64;       // local-attention chunk length, frames
  int64_t fsmn_taps = 8;    // depthwise taps per memory stage
  std::vector<int64_t> fsmn_dilations = {1, 2, 4, 8};
  std::string mask_activation = "relu";

  void validate() const {
    if (channels < 1) throw ConfigError("separator: channels >= 1");
    if (blocks < 1) throw ConfigError("separator: blocks >= 1");
    if (chunk < 1) throw ConfigError("separator: chunk >= 1");
    if (fsmn_taps < 2) throw ConfigError("separator: fsmn_taps >= 2");
    if (fsmn_dilations.empty()) {
      throw ConfigError("separator: at least one FSMN dilation");
    }
    for (size_t i = 0; i < fsmn_dilations.size(); ++i) {
      if (fsmn_dilations[i] < 1 ||
          (i > 0 && fsmn_dilations[i] <= fsmn_dilations[i - 1])) {
        throw ConfigError("separator: dilations must be strictly increasing");
      }
    }
    if (mask_activation != "relu") {
      throw ConfigError("separator: unknown mask activation '" +
                        mask_activation + "'");
    }
  }

  // Width of the FSMN impulse-response support (frames): each stage widens
  // the reach by dilation * (taps - 1).
  int64_t fsmn_support() const {
    int64_t s = 1;
    for (int64_t d : fsmn_dilations) s += d * (fsmn_taps - 1);
    return s;
  }
};

namespace detail {

// 1x1 convolution over channels with bias: (B, Cin, D) -> (B, Cout, D).
template <typename T>
nn::Var<T> conv1x1(nn::Workspace<T>& ws, nn::Var<T> x, int64_t c_out,
                   const std::string& name) {
  const int64_t c_in = x.dim(1);
  nn::Var<T> w = ws.param_uniform(name + ".w", {c_out, c_in, 1}, c_in);
  nn::Var<T> b = ws.param_const(name + ".b", {c_out}, T(0));
  return nn::add_channel_bias(nn::conv1d(x, w, 1, 0, 0), b);
}

}  // namespace detail

// Merge the speech embedding (B, C, D) with the EEG embedding (B, C_EEG, D):
// channel concatenation followed by a bias-free 1x1 conv back to C channels.
// Bias-free keeps the merge exactly linear in both inputs.
template <typename T>
nn::Var<T> fuse(nn::Workspace<T>& ws, nn::Var<T> speech, nn::Var<T> eeg,
                const std::string& prefix = "fuse") {
  if (speech.rank() != 3 || eeg.rank() != 3) {
    throw DimError("fuse expects rank-3 feature maps");
  }
  if (speech.dim(0) != eeg.dim(0) || speech.dim(2) != eeg.dim(2)) {
    throw DimError("fuse: batch/time axes differ: " +
                   nn::shape_str(speech.shape()) + " vs " +
                   nn::shape_str(eeg.shape()));
  }
  const int64_t c = speech.dim(1);
  const int64_t c_in = c + eeg.dim(1);
  nn::Var<T> cat = nn::concat<T>({speech, eeg}, /*axis=*/1);
  nn::Var<T> w = ws.param_uniform(prefix + ".w", {c, c_in, 1}, c_in);
  return nn::conv1d(cat, w, 1, 0, 0);
}

// Shared attention action A applied to a value sequence: chunked local full
// attention plus global linear attention, summed. q/k/val are (L, E).
template <typename T>
nn::Var<T> attention_action(nn::Var<T> q, nn::Var<T> k, nn::Var<T> val,
                            int64_t chunk) {
  return nn::attend_local_global(q, k, val, chunk, T(nn::kAttnEps));
}

// Attention block: O = X + ConvM(sigmoid((U * A V) * A U)).
// U and V are 1x1-conv projections; the attention map A is built once from
// 1x1-conv query/key projections of X and applied to both V and U.
template <typename T>
nn::Var<T> gated_attention_block(nn::Workspace<T>& ws, nn::Var<T> x,
                            const SeparatorConfig& cfg,
                            const std::string& prefix) {
  cfg.validate();
  if (x.rank() != 3 || x.dim(1) != cfg.channels) {
    throw DimError("attention block expects (B, " +
                   std::to_string(cfg.channels) + ", D), got " +
                   nn::shape_str(x.shape()));
  }
  const int64_t b = x.dim(0);
  const int64_t c = cfg.channels;
  const int64_t d = x.dim(2);
  nn::Var<T> u = detail::conv1x1(ws, x, c, prefix + ".u");
  nn::Var<T> v = detail::conv1x1(ws, x, c, prefix + ".v");
  nn::Var<T> q = detail::conv1x1(ws, x, c, prefix + ".q");
  nn::Var<T> k = detail::conv1x1(ws, x, c, prefix + ".k");

  // Attention runs over the time axis: per batch item, sequences are (D, C).
  std::vector<nn::Var<T>> av_rows, au_rows;
  av_rows.reserve(static_cast<size_t>(b));
  au_rows.reserve(static_cast<size_t>(b));
  for (int64_t bi = 0; bi < b; ++bi) {
    auto seq = [&](nn::Var<T> m) {
      return nn::transpose2d(nn::reshape(nn::narrow(m, 0, bi, 1), {c, d}));
    };
    nn::Var<T> qs = seq(q), ks = seq(k);
    nn::Var<T> av = attention_action(qs, ks, seq(v), cfg.chunk);
    nn::Var<T> au = attention_action(qs, ks, seq(u), cfg.chunk);
    av_rows.push_back(nn::reshape(nn::transpose2d(av), {int64_t{1}, c, d}));
    au_rows.push_back(nn::reshape(nn::transpose2d(au), {int64_t{1}, c, d}));
  }
  nn::Var<T> av = nn::concat(av_rows, 0);
  nn::Var<T> au = nn::concat(au_rows, 0);
  nn::Var<T> gate = nn::sigmoid(nn::mul(nn::mul(u, av), au));
  return nn::add(x, detail::conv1x1(ws, gate, c, prefix + ".m"));
}

// Dilated feed-forward sequential memory: stages of depthwise conv over time
// with increasing dilation; every stage sees the concatenation of all
// previous stage outputs (dense skips) through a 1x1 merge, and the final
// concatenation is merged back to C channels.
template <typename T>
nn::Var<T> dilated_fsmn(nn::Workspace<T>& ws, nn::Var<T> x,
                        const SeparatorConfig& cfg,
                        const std::string& prefix) {
  cfg.validate();
  if (x.rank() != 3 || x.dim(1) != cfg.channels) {
    throw DimError("fsmn expects (B, " + std::to_string(cfg.channels) +
                   ", D), got " + nn::shape_str(x.shape()));
  }
  const int64_t c = cfg.channels;
  std::vector<nn::Var<T>> feats = {x};
  for (size_t j = 0; j < cfg.fsmn_dilations.size(); ++j) {
    const std::string sp = prefix + ".stage" + std::to_string(j + 1);
    nn::Var<T> inp = feats.size() == 1 ? feats[0] : nn::concat(feats, 1);
    nn::Var<T> h = detail::conv1x1(ws, inp, c, sp + ".merge");
    nn::Var<T> w = ws.param_uniform(sp + ".taps", {c, cfg.fsmn_taps},
                                    cfg.fsmn_taps);
    nn::Var<T> mem = nn::depthwise_conv1d(h, w, cfg.fsmn_dilations[j]);
    feats.push_back(nn::elu(nn::add(h, mem)));
  }
  return detail::conv1x1(ws, nn::concat(feats, 1), c, prefix + ".out");
}

// Memory block: O = X + U * DilatedFSMN(V), U and V distinct projections.
template <typename T>
nn::Var<T> recurrent_block(nn::Workspace<T>& ws, nn::Var<T> x,
                           const SeparatorConfig& cfg,
                           const std::string& prefix) {
  cfg.validate();
  if (x.rank() != 3 || x.dim(1) != cfg.channels) {
    throw DimError("memory block expects (B, " +
                   std::to_string(cfg.channels) + ", D), got " +
                   nn::shape_str(x.shape()));
  }
  nn::Var<T> u = detail::conv1x1(ws, x, cfg.channels, prefix + ".u");
  nn::Var<T> v = detail::conv1x1(ws, x, cfg.channels, prefix + ".v");
  nn::Var<T> y = dilated_fsmn(ws, v, cfg, prefix + ".fsmn");
  return nn::add(x, nn::mul(u, y));
}

// R (attention, memory) pairs then a 1x1 conv + ReLU mask head: M >= 0.
template <typename T>
nn::Var<T> estimate_mask(nn::Workspace<T>& ws, nn::Var<T> fused,
                         const SeparatorConfig& cfg,
                         const std::string& prefix = "sep") {
  cfg.validate();
  nn::Var<T> h = fused;
  for (int64_t r = 1; r <= cfg.blocks; ++r) {
    const std::string bp = prefix + ".b" + std::to_string(r);
    h = gated_attention_block(ws, h, cfg, bp + ".attn");
    h = recurrent_block(ws, h, cfg, bp + ".mem");
  }
  return nn::relu(detail::conv1x1(ws, h, cfg.channels, prefix + ".head"));
}

// Elementwise mask application on identically-shaped feature maps.
template <typename T>
nn::Var<T> apply_mask(nn::Var<T> x, nn::Var<T> mask) {
  nn::check_same_shape(x.shape(), mask.shape(), "apply_mask");
  return nn::mul(x, mask);
}

}  // namespace sep
}  // namespace eegsep

#endif  // EEGSEP_SEP_SEPARATOR_H_
