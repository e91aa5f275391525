// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// 1-D convolutions on (B, C, T) tensors: strided conv, transposed conv
// (overlap-add) and dilated depthwise conv. All loops are expressed as
// contiguous dot/axpy runs so the SIMD kernels carry the inner work.

#ifndef EEGSEP_NN_OPS_CONV_H_
#define EEGSEP_NN_OPS_CONV_H_

#include <cstring>
#include <vector>

#include "kernels/kernels.h"
#include "nn/tape.h"

namespace eegsep::nn {

inline int64_t conv1d_out_len(int64_t t, int64_t k, int64_t stride, int64_t padl,
                              int64_t padr) {
  int64_t eff = t + padl + padr;
  if (eff < k) throw LengthError("conv1d: input shorter than kernel");
  return (eff - k) / stride + 1;
}

namespace detail {

// Copy one channel row into a zero-padded scratch row of length t + padl + padr.
template <typename T>
inline void pad_row(const T* src, int64_t t, int64_t padl, int64_t padr, T* dst) {
  std::memset(dst, 0, static_cast<size_t>(t + padl + padr) * sizeof(T));
  std::memcpy(dst + padl, src, static_cast<size_t>(t) * sizeof(T));
}

}  // namespace detail

// x (B, Cin, T) * w (Cout, Cin, K) -> (B, Cout, T') with
// T' = (T + padl + padr - K) / stride + 1.
template <typename T>
Var<T> conv1d(Var<T> x, Var<T> w, int64_t stride, int64_t padl, int64_t padr) {
  if (x.rank() != 3 || w.rank() != 3) throw DimError("conv1d: rank-3 required");
  if (stride < 1 || padl < 0 || padr < 0) throw ValueError("conv1d: bad stride/pad");
  int64_t b = x.dim(0), cin = x.dim(1), t = x.dim(2);
  int64_t cout = w.dim(0), k = w.dim(2);
  if (w.dim(1) != cin)
    throw DimError("conv1d: channel mismatch " + shape_str(x.shape()) + " vs " +
                   shape_str(w.shape()));
  int64_t to = conv1d_out_len(t, k, stride, padl, padr);
  int64_t tp = t + padl + padr;
  Tape<T>& tape = *x.tape;
  Tensor<T> out({b, cout, to});
  std::vector<T> pad(static_cast<size_t>(tp));
  const T* xp = x.value().data();
  const T* wp = w.value().data();
  T* op = out.data();
  for (int64_t ib = 0; ib < b; ++ib) {
    for (int64_t ci = 0; ci < cin; ++ci) {
      detail::pad_row(xp + (ib * cin + ci) * t, t, padl, padr, pad.data());
      for (int64_t co = 0; co < cout; ++co) {
        const T* wr = wp + (co * cin + ci) * k;
        T* orow = op + (ib * cout + co) * to;
        for (int64_t j = 0; j < to; ++j)
          orow[j] += kernels::dot(wr, pad.data() + j * stride, k);
      }
    }
  }
  int ix = x.id, iw = w.id;
  return tape.wrap(tape.emit_op(
      std::move(out), {ix, iw},
      [ix, iw, b, cin, t, cout, k, to, tp, stride, padl](Tape<T>& tpe, int id) {
        const T* g = tpe.grad(id).data();
        const T* xp = tpe.value(ix).data();
        const T* wp = tpe.value(iw).data();
        bool need_x = tpe.node(ix).needs_grad;
        bool need_w = tpe.node(iw).needs_grad;
        std::vector<T> pad(static_cast<size_t>(tp));
        std::vector<T> dpad(static_cast<size_t>(tp));
        T* dx = need_x ? tpe.grad(ix).data() : nullptr;
        T* dw = need_w ? tpe.grad(iw).data() : nullptr;
        for (int64_t ib = 0; ib < b; ++ib) {
          for (int64_t ci = 0; ci < cin; ++ci) {
            if (need_w) detail::pad_row(xp + (ib * cin + ci) * t, t, padl, tp - t - padl, pad.data());
            if (need_x) std::memset(dpad.data(), 0, static_cast<size_t>(tp) * sizeof(T));
            for (int64_t co = 0; co < cout; ++co) {
              const T* grow = g + (ib * cout + co) * to;
              const T* wr = wp + (co * cin + ci) * k;
              T* dwr = need_w ? dw + (co * cin + ci) * k : nullptr;
              for (int64_t j = 0; j < to; ++j) {
                T gj = grow[j];
                if (gj == T(0)) continue;
                if (need_x) kernels::axpy(gj, wr, dpad.data() + j * stride, k);
                if (need_w) kernels::axpy(gj, pad.data() + j * stride, dwr, k);
              }
            }
            if (need_x)
              kernels::axpy(T(1), dpad.data() + padl, dx + (ib * cin + ci) * t, t);
          }
        }
      },
      "conv1d"));
}

// x (B, Cin, S) * w (Cin, Cout, K), stride s -> (B, Cout, (S-1)*s + K) by
// overlap-add; the adjoint of an unpadded conv1d with the same kernel.
template <typename T>
Var<T> conv1d_transpose(Var<T> x, Var<T> w, int64_t stride) {
  if (x.rank() != 3 || w.rank() != 3) throw DimError("conv1d_transpose: rank-3 required");
  if (stride < 1) throw ValueError("conv1d_transpose: bad stride");
  int64_t b = x.dim(0), cin = x.dim(1), s = x.dim(2);
  int64_t cout = w.dim(1), k = w.dim(2);
  if (w.dim(0) != cin)
    throw DimError("conv1d_transpose: channel mismatch " + shape_str(x.shape()) +
                   " vs " + shape_str(w.shape()));
  int64_t to = (s - 1) * stride + k;
  Tape<T>& tape = *x.tape;
  Tensor<T> out({b, cout, to});
  const T* xp = x.value().data();
  const T* wp = w.value().data();
  T* op = out.data();
  for (int64_t ib = 0; ib < b; ++ib) {
    for (int64_t ci = 0; ci < cin; ++ci) {
      const T* xrow = xp + (ib * cin + ci) * s;
      for (int64_t co = 0; co < cout; ++co) {
        const T* wr = wp + (ci * cout + co) * k;
        T* orow = op + (ib * cout + co) * to;
        for (int64_t j = 0; j < s; ++j) {
          if (xrow[j] == T(0)) continue;
          kernels::axpy(xrow[j], wr, orow + j * stride, k);
        }
      }
    }
  }
  int ix = x.id, iw = w.id;
  return tape.wrap(tape.emit_op(
      std::move(out), {ix, iw},
      [ix, iw, b, cin, s, cout, k, to, stride](Tape<T>& tpe, int id) {
        const T* g = tpe.grad(id).data();
        const T* xp = tpe.value(ix).data();
        const T* wp = tpe.value(iw).data();
        bool need_x = tpe.node(ix).needs_grad;
        bool need_w = tpe.node(iw).needs_grad;
        T* dx = need_x ? tpe.grad(ix).data() : nullptr;
        T* dw = need_w ? tpe.grad(iw).data() : nullptr;
        for (int64_t ib = 0; ib < b; ++ib) {
          for (int64_t ci = 0; ci < cin; ++ci) {
            const T* xrow = xp + (ib * cin + ci) * s;
            T* dxrow = need_x ? dx + (ib * cin + ci) * s : nullptr;
            for (int64_t co = 0; co < cout; ++co) {
              const T* wr = wp + (ci * cout + co) * k;
              const T* grow = g + (ib * cout + co) * to;
              T* dwr = need_w ? dw + (ci * cout + co) * k : nullptr;
              for (int64_t j = 0; j < s; ++j) {
                if (need_x) dxrow[j] += kernels::dot(grow + j * stride, wr, k);
                if (need_w && xrow[j] != T(0))
                  kernels::axpy(xrow[j], grow + j * stride, dwr, k);
              }
            }
          }
        }
      },
      "conv1d_transpose"));
}

// Same-length dilated depthwise conv: x (B, C, T) * w (C, K) -> (B, C, T),
// taps at t + (k - K/2)*dilation with zero padding outside.
template <typename T>
Var<T> depthwise_conv1d(Var<T> x, Var<T> w, int64_t dilation) {
  if (x.rank() != 3 || w.rank() != 2) throw DimError("depthwise_conv1d: bad ranks");
  if (dilation < 1) throw ValueError("depthwise_conv1d: bad dilation");
  int64_t b = x.dim(0), c = x.dim(1), t = x.dim(2);
  int64_t k = w.dim(1);
  if (w.dim(0) != c) throw DimError("depthwise_conv1d: channel mismatch");
  int64_t half = k / 2;
  Tape<T>& tape = *x.tape;
  Tensor<T> out({b, c, t});
  const T* xp = x.value().data();
  const T* wp = w.value().data();
  T* op = out.data();
  for (int64_t r = 0; r < b * c; ++r) {
    const T* xrow = xp + r * t;
    const T* wr = wp + (r % c) * k;
    T* orow = op + r * t;
    for (int64_t kk = 0; kk < k; ++kk) {
      int64_t off = (kk - half) * dilation;
      int64_t lo = std::max<int64_t>(0, -off);
      int64_t hi = std::min<int64_t>(t, t - off);
      if (hi > lo) kernels::axpy(wr[kk], xrow + lo + off, orow + lo, hi - lo);
    }
  }
  int ix = x.id, iw = w.id;
  return tape.wrap(tape.emit_op(
      std::move(out), {ix, iw},
      [ix, iw, b, c, t, k, half, dilation](Tape<T>& tpe, int id) {
        const T* g = tpe.grad(id).data();
        const T* xp = tpe.value(ix).data();
        const T* wp = tpe.value(iw).data();
        bool need_x = tpe.node(ix).needs_grad;
        bool need_w = tpe.node(iw).needs_grad;
        T* dx = need_x ? tpe.grad(ix).data() : nullptr;
        T* dw = need_w ? tpe.grad(iw).data() : nullptr;
        for (int64_t r = 0; r < b * c; ++r) {
          const T* grow = g + r * t;
          const T* xrow = xp + r * t;
          const T* wr = wp + (r % c) * k;
          T* dxrow = need_x ? dx + r * t : nullptr;
          T* dwr = need_w ? dw + (r % c) * k : nullptr;
          for (int64_t kk = 0; kk < k; ++kk) {
            int64_t off = (kk - half) * dilation;
            int64_t lo = std::max<int64_t>(0, -off);
            int64_t hi = std::min<int64_t>(t, t - off);
            if (hi <= lo) continue;
            if (need_x) kernels::axpy(wr[kk], grow + lo, dxrow + lo + off, hi - lo);
            if (need_w) dwr[kk] += kernels::dot(grow + lo, xrow + lo + off, hi - lo);
          }
        }
      },
      "depthwise_conv1d"));
}

// x (B, C, T) + bias (C), broadcast over batch and time.
template <typename T>
Var<T> add_channel_bias(Var<T> x, Var<T> bias) {
  if (x.rank() != 3 || bias.rank() != 1) throw DimError("add_channel_bias: bad ranks");
  int64_t b = x.dim(0), c = x.dim(1), t = x.dim(2);
  if (bias.dim(0) != c) throw DimError("add_channel_bias: channel mismatch");
  Tape<T>& tape = *x.tape;
  Tensor<T> out = x.value();
  const T* bp = bias.value().data();
  T* op = out.data();
  for (int64_t r = 0; r < b * c; ++r) {
    T bv = bp[r % c];
    T* row = op + r * t;
    for (int64_t j = 0; j < t; ++j) row[j] += bv;
  }
  int ix = x.id, ib = bias.id;
  return tape.wrap(tape.emit_op(
      std::move(out), {ix, ib},
      [ix, ib, b, c, t](Tape<T>& tpe, int id) {
        const T* g = tpe.grad(id).data();
        if (tpe.node(ix).needs_grad)
          kernels::axpy(T(1), g, tpe.grad(ix).data(), b * c * t);
        if (tpe.node(ib).needs_grad) {
          T* db = tpe.grad(ib).data();
          for (int64_t r = 0; r < b * c; ++r) db[r % c] += kernels::sum(g + r * t, t);
        }
      },
      "add_channel_bias"));
}

// x (..., D) + bias (D), broadcast over leading dims.
template <typename T>
Var<T> add_lastdim_bias(Var<T> x, Var<T> bias) {
  if (bias.rank() != 1) throw DimError("add_lastdim_bias: bias must be rank 1");
  const Shape& xs = x.shape();
  if (xs.empty() || xs.back() != bias.dim(0))
    throw DimError("add_lastdim_bias: trailing dim mismatch");
  int64_t d = xs.back();
  int64_t rows = x.value().size() / d;
  Tape<T>& tape = *x.tape;
  Tensor<T> out = x.value();
  for (int64_t r = 0; r < rows; ++r)
    kernels::axpy(T(1), bias.value().data(), out.data() + r * d, d);
  int ix = x.id, ib = bias.id;
  return tape.wrap(tape.emit_op(
      std::move(out), {ix, ib},
      [ix, ib, rows, d](Tape<T>& tpe, int id) {
        const T* g = tpe.grad(id).data();
        if (tpe.node(ix).needs_grad)
          kernels::axpy(T(1), g, tpe.grad(ix).data(), rows * d);
        if (tpe.node(ib).needs_grad) {
          T* db = tpe.grad(ib).data();
          for (int64_t r = 0; r < rows; ++r) kernels::axpy(T(1), g + r * d, db, d);
        }
      },
      "add_lastdim_bias"));
}

}  // namespace eegsep::nn

#endif  // EEGSEP_NN_OPS_CONV_H_
