// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Learned speech codec: a strided 1-D convolutional encoder with a ReLU
// nonlinearity, and a transposed-convolution (overlap-add) decoder.  Both
// halves are bias-free, so the encoder maps silence to an exactly zero
// embedding and the decoder is exactly linear in its input.

#ifndef EEGSEP_CODEC_CODEC_H_
#define EEGSEP_CODEC_CODEC_H_

#include <cstdint>
#include <string>

#include "common/error.h"
#include "nn/ops.h"
#include "nn/ops_conv.h"
#include "nn/registry.h"

namespace eegsep {
namespace codec {

// Encoder/decoder geometry.  The analysis window is `kernel_len` samples wide
// and advances by half a window per frame (50% overlap), so `kernel_len` must
// be even.  `channels` is the embedding width C.
struct CodecConfig {
  int64_t kernel_len = 20;
  int64_t channels = 128;

  int64_t stride() const { return kernel_len / 2; }

  void validate() const {
    if (kernel_len < 2 || kernel_len % 2 != 0) {
      throw ConfigError("codec kernel_len must be even and >= 2, got " +
                        std::to_string(kernel_len));
    }
    if (channels < 1) {
      throw ConfigError("codec channels must be >= 1, got " +
                        std::to_string(channels));
    }
  }
};

// Number of frames the encoder produces for an input of `t` samples, after
// right-padding `t` up to the next frame boundary.  Requires t >= kernel_len.
inline int64_t encoded_frames(int64_t t, const CodecConfig& cfg) {
  cfg.validate();
  if (t < cfg.kernel_len) {
    throw LengthError("speech too short to encode: " + std::to_string(t) +
                      " samples < kernel_len " + std::to_string(cfg.kernel_len));
  }
  const int64_t hop = cfg.stride();
  return (t - cfg.kernel_len + hop - 1) / hop + 1;
}

// Samples of zero right-padding needed so (t + pad - kernel_len) is a whole
// number of hops.
inline int64_t encode_padding(int64_t t, const CodecConfig& cfg) {
  const int64_t s = encoded_frames(t, cfg);
  return (s - 1) * cfg.stride() + cfg.kernel_len - t;
}

// Samples produced by the decoder from `s` frames: (s-1)*stride + kernel_len.
inline int64_t decoded_samples(int64_t s, const CodecConfig& cfg) {
  cfg.validate();
  if (s < 1) throw DimError("decoder needs at least one frame");
  return (s - 1) * cfg.stride() + cfg.kernel_len;
}

// Encode a waveform batch (B, 1, T) to an embedding (B, C, S) with
// S = (T - kernel_len)/stride + 1 (after right-padding ragged T with zeros).
// The embedding is elementwise nonnegative (ReLU).
template <typename T>
nn::Var<T> encode_speech(nn::Workspace<T>& ws, nn::Var<T> x,
                         const CodecConfig& cfg,
                         const std::string& prefix = "codec") {
  cfg.validate();
  if (x.rank() != 3 || x.dim(1) != 1) {
    throw DimError("encode_speech expects (B, 1, T), got " +
                   nn::shape_str(x.shape()));
  }
  const int64_t t = x.dim(2);
  const int64_t pad = encode_padding(t, cfg);  // throws LengthError if short
  nn::Var<T> w = ws.param_uniform(prefix + ".enc.w",
                                  {cfg.channels, 1, cfg.kernel_len},
                                  /*fan_in=*/cfg.kernel_len);
  nn::Var<T> y = nn::conv1d(x, w, cfg.stride(), /*pad_left=*/0,
                            /*pad_right=*/pad);
  return nn::relu(y);
}

// Decode an embedding (B, C, S) back to a waveform (B, 1, T_out) with
// T_out = (S-1)*stride + kernel_len, by transposed convolution (overlap-add
// of per-frame syntheses).  Linear: decode(a*x + b*y) = a*dec(x) + b*dec(y).
template <typename T>
nn::Var<T> decode_speech(nn::Workspace<T>& ws, nn::Var<T> emb,
                         const CodecConfig& cfg,
                         const std::string& prefix = "codec") {
  cfg.validate();
  if (emb.rank() != 3 || emb.dim(1) != cfg.channels) {
    throw DimError("decode_speech expects (B, " +
                   std::to_string(cfg.channels) + ", S), got " +
                   nn::shape_str(emb.shape()));
  }
  nn::Var<T> w = ws.param_uniform(prefix + ".dec.w",
                                  {cfg.channels, 1, cfg.kernel_len},
                                  /*fan_in=*/cfg.channels * cfg.kernel_len);
  return nn::conv1d_transpose(emb, w, cfg.stride());
}

}  // namespace codec
}  // namespace eegsep

#endif  // EEGSEP_CODEC_CODEC_H_
