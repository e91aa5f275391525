// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Batch normalization over an arbitrary channel axis, with running statistics
// for eval mode, plus the BN→ELU wrapper used throughout the encoders.

#ifndef EEGSEP_NN_OPS_NORM_H_
#define EEGSEP_NN_OPS_NORM_H_

#include <cmath>
#include <vector>

#include "kernels/kernels.h"
#include "nn/ops.h"
#include "nn/tape.h"

namespace eegsep::nn {

inline constexpr double kBnEps = 1e-5;
inline constexpr double kBnMomentum = 0.1;

// Normalize x over every axis except `channel_axis`, then scale/shift by
// gamma/beta (length C). In training mode batch statistics are used and the
// running buffers are updated in place as (1-m)*run + m*batch with biased
// variance; in eval mode the running buffers are used directly.
template <typename T>
Var<T> batch_norm(Var<T> x, Var<T> gamma, Var<T> beta, size_t channel_axis,
                  bool training, Tensor<T>* running_mean, Tensor<T>* running_var,
                  T momentum = T(kBnMomentum), T eps = T(kBnEps)) {
  detail::same_tape(x, gamma, "batch_norm");
  detail::same_tape(x, beta, "batch_norm");
  int64_t outer, c, inner;
  detail::axis_split(x.shape(), channel_axis, &outer, &c, &inner);
  if (gamma.value().size() != c || beta.value().size() != c)
    throw DimError("batch_norm: gamma/beta length mismatch");
  if (running_mean->size() != c || running_var->size() != c)
    throw DimError("batch_norm: running stat length mismatch");
  int64_t n = outer * inner;  // samples per channel
  if (n < 1) throw LengthError("batch_norm: empty input");

  std::vector<T> mean(static_cast<size_t>(c)), invstd(static_cast<size_t>(c));
  const T* xp = x.value().data();
  if (training) {
    for (int64_t ch = 0; ch < c; ++ch) {
      T s = T(0);
      for (int64_t o = 0; o < outer; ++o)
        s += kernels::sum(xp + (o * c + ch) * inner, inner);
      T m = s / static_cast<T>(n);
      T v = T(0);
      for (int64_t o = 0; o < outer; ++o) {
        const T* row = xp + (o * c + ch) * inner;
        for (int64_t i = 0; i < inner; ++i) {
          T d = row[i] - m;
          v += d * d;
        }
      }
      v /= static_cast<T>(n);
      mean[ch] = m;
      invstd[ch] = T(1) / std::sqrt(v + eps);
      (*running_mean)[ch] = (T(1) - momentum) * (*running_mean)[ch] + momentum * m;
      (*running_var)[ch] = (T(1) - momentum) * (*running_var)[ch] + momentum * v;
    }
  } else {
    for (int64_t ch = 0; ch < c; ++ch) {
      mean[ch] = (*running_mean)[ch];
      invstd[ch] = T(1) / std::sqrt((*running_var)[ch] + eps);
    }
  }

  Tape<T>& tp = *x.tape;
  Tensor<T> out(x.shape());
  const T* gp = gamma.value().data();
  const T* bp = beta.value().data();
  T* op = out.data();
  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t ch = 0; ch < c; ++ch) {
      const T* row = xp + (o * c + ch) * inner;
      T* orow = op + (o * c + ch) * inner;
      T m = mean[ch], is = invstd[ch], ga = gp[ch], be = bp[ch];
      for (int64_t i = 0; i < inner; ++i) orow[i] = (row[i] - m) * is * ga + be;
    }
  }

  int ix = x.id, ig = gamma.id, ib = beta.id;
  bool train_mode = training;
  return tp.wrap(tp.emit_op(
      std::move(out), {ix, ig, ib},
      [ix, ig, ib, outer, c, inner, n, mean, invstd, train_mode](Tape<T>& t, int id) {
        const T* g = t.grad(id).data();
        const T* xp = t.value(ix).data();
        const T* gp = t.value(ig).data();
        // Per-channel reductions: sg = Σg, sgx = Σ g·xhat.
        std::vector<T> sg(static_cast<size_t>(c), T(0));
        std::vector<T> sgx(static_cast<size_t>(c), T(0));
        for (int64_t o = 0; o < outer; ++o) {
          for (int64_t ch = 0; ch < c; ++ch) {
            const T* grow = g + (o * c + ch) * inner;
            const T* xrow = xp + (o * c + ch) * inner;
            T m = mean[ch], is = invstd[ch];
            T a = T(0), b2 = T(0);
            for (int64_t i = 0; i < inner; ++i) {
              a += grow[i];
              b2 += grow[i] * (xrow[i] - m) * is;
            }
            sg[ch] += a;
            sgx[ch] += b2;
          }
        }
        if (t.node(ig).needs_grad)
          for (int64_t ch = 0; ch < c; ++ch) t.grad(ig)[ch] += sgx[ch];
        if (t.node(ib).needs_grad)
          for (int64_t ch = 0; ch < c; ++ch) t.grad(ib)[ch] += sg[ch];
        if (t.node(ix).needs_grad) {
          T* dx = t.grad(ix).data();
          for (int64_t o = 0; o < outer; ++o) {
            for (int64_t ch = 0; ch < c; ++ch) {
              const T* grow = g + (o * c + ch) * inner;
              const T* xrow = xp + (o * c + ch) * inner;
              T* drow = dx + (o * c + ch) * inner;
              T m = mean[ch], is = invstd[ch], ga = gp[ch];
              if (train_mode) {
                T k1 = ga * is / static_cast<T>(n);
                for (int64_t i = 0; i < inner; ++i) {
                  T xhat = (xrow[i] - m) * is;
                  drow[i] += k1 * (static_cast<T>(n) * grow[i] - sg[ch] - xhat * sgx[ch]);
                }
              } else {
                kernels::axpy(ga * is, grow, drow, inner);
              }
            }
          }
        }
      },
      "batch_norm"));
}

// The ε(·) wrapper: batch norm followed by ELU.
template <typename T>
Var<T> bn_elu(Var<T> x, Var<T> gamma, Var<T> beta, size_t channel_axis, bool training,
              Tensor<T>* running_mean, Tensor<T>* running_var,
              T momentum = T(kBnMomentum), T eps = T(kBnEps)) {
  return elu(batch_norm(x, gamma, beta, channel_axis, training, running_mean,
                        running_var, momentum, eps));
}

}  // namespace eegsep::nn

#endif  // EEGSEP_NN_OPS_NORM_H_
