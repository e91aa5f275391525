// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Attention built by composing tape ops: scaled-dot softmax attention,
// O(L) linearized attention with an ELU+1 feature map, chunked local
// attention, and multi-head self-attention for the electrode axis.

#ifndef EEGSEP_NN_ATTENTION_H_
#define EEGSEP_NN_ATTENTION_H_

#include <cmath>
#include <vector>

#include "nn/ops.h"
#include "nn/ops_conv.h"
#include "nn/tape.h"

namespace eegsep::nn {

inline constexpr double kAttnEps = 1e-8;

// softmax(Q K^T / sqrt(d)) V for 2-D (L, d) inputs.
template <typename T>
Var<T> softmax_attention(Var<T> q, Var<T> k, Var<T> v) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2)
    throw DimError("softmax_attention: rank-2 required");
  if (q.dim(1) != k.dim(1) || k.dim(0) != v.dim(0))
    throw DimError("softmax_attention: shape mismatch");
  T inv_sqrt_d = T(1) / std::sqrt(static_cast<T>(q.dim(1)));
  Var<T> scores = scale_const(matmul(q, transpose2d(k)), inv_sqrt_d);
  return matmul(softmax_rows(scores), v);
}

// Linearized attention with feature map phi(x) = ELU(x) + 1 (strictly
// positive); per-query normalizer floored at eps. O(L d^2) instead of O(L^2 d).
template <typename T>
Var<T> linear_attention(Var<T> q, Var<T> k, Var<T> v, T eps = T(kAttnEps)) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2)
    throw DimError("linear_attention: rank-2 required");
  if (q.dim(1) != k.dim(1) || k.dim(0) != v.dim(0))
    throw DimError("linear_attention: shape mismatch");
  Tape<T>& tp = *q.tape;
  int64_t lk = k.dim(0);
  Var<T> pq = add_const(elu(q), T(1));  // (Lq, d)
  Var<T> pk = add_const(elu(k), T(1));  // (Lk, d)
  Var<T> pkt = transpose2d(pk);         // (d, Lk)
  Var<T> kv = matmul(pkt, v);           // (d, dv)
  Var<T> num = matmul(pq, kv);          // (Lq, dv)
  Var<T> ones = tp.constant(Tensor<T>({lk, 1}, std::vector<T>(lk, T(1))), "ones");
  Var<T> ksum = matmul(pkt, ones);                       // (d, 1)
  Var<T> z = reshape(matmul(pq, ksum), {q.dim(0)});      // (Lq)
  return rows_scale(num, recip_eps(z, eps));
}

// Full softmax attention within non-overlapping chunks of `chunk` frames
// along the sequence axis; a final short chunk attends within itself.
template <typename T>
Var<T> chunked_softmax_attention(Var<T> q, Var<T> k, Var<T> v, int64_t chunk) {
  if (chunk < 1) throw ValueError("chunked_softmax_attention: chunk >= 1 required");
  if (q.dim(0) != k.dim(0))
    throw DimError("chunked_softmax_attention: query/key length mismatch");
  int64_t l = q.dim(0);
  if (l <= chunk) return softmax_attention(q, k, v);
  std::vector<Var<T>> outs;
  for (int64_t start = 0; start < l; start += chunk) {
    int64_t len = std::min(chunk, l - start);
    outs.push_back(softmax_attention(narrow(q, 0, start, len), narrow(k, 0, start, len),
                                     narrow(v, 0, start, len)));
  }
  return concat(outs, 0);
}

// Shared attention-map action: chunked local softmax plus linear global,
// summed. This is the "A V" / "A U" operator of the gated block.
template <typename T>
Var<T> attend_local_global(Var<T> q, Var<T> k, Var<T> v, int64_t chunk,
                           T eps = T(kAttnEps)) {
  return add(chunked_softmax_attention(q, k, v, chunk), linear_attention(q, k, v, eps));
}

// Standard multi-head self-attention on a single (L, D) slice. Weight mats
// are (D, D); biases length D; D must divide evenly into heads.
template <typename T>
Var<T> multihead_self_attention(Var<T> x, Var<T> wq, Var<T> wk, Var<T> wv, Var<T> wo,
                                Var<T> bq, Var<T> bk, Var<T> bv, Var<T> bo,
                                int64_t heads) {
  if (x.rank() != 2) throw DimError("multihead_self_attention: rank-2 required");
  int64_t d = x.dim(1);
  if (heads < 1 || d % heads != 0)
    throw DimError("multihead_self_attention: head count must divide feature dim");
  int64_t dh = d / heads;
  Var<T> q = add_lastdim_bias(matmul(x, wq), bq);
  Var<T> k = add_lastdim_bias(matmul(x, wk), bk);
  Var<T> v = add_lastdim_bias(matmul(x, wv), bv);
  std::vector<Var<T>> head_outs;
  for (int64_t h = 0; h < heads; ++h) {
    head_outs.push_back(softmax_attention(narrow(q, 1, h * dh, dh),
                                          narrow(k, 1, h * dh, dh),
                                          narrow(v, 1, h * dh, dh)));
  }
  return add_lastdim_bias(matmul(concat(head_outs, 1), wo), bo);
}

}  // namespace eegsep::nn

#endif  // EEGSEP_NN_ATTENTION_H_
