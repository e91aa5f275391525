// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Tape ops: elementwise math, structural reshuffles, matmul, softmax and
// the small broadcast helpers the encoders need. Convolutions live in
// ops_conv.h, normalization in ops_norm.h, attention in attention.h.

#ifndef EEGSEP_NN_OPS_H_
#define EEGSEP_NN_OPS_H_

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "kernels/kernels.h"
#include "nn/tape.h"

namespace eegsep::nn {

namespace detail {

template <typename T>
inline void same_tape(Var<T> a, Var<T> b, const char* op) {
  if (a.tape != b.tape) throw ValueError(std::string(op) + ": vars from different tapes");
}

// (outer, axis_dim, inner) factorization of a shape around `axis`.
inline void axis_split(const Shape& s, size_t axis, int64_t* outer, int64_t* mid,
                       int64_t* inner) {
  if (axis >= s.size()) throw DimError("axis out of range");
  int64_t o = 1, i = 1;
  for (size_t k = 0; k < axis; ++k) o *= s[k];
  for (size_t k = axis + 1; k < s.size(); ++k) i *= s[k];
  *outer = o;
  *mid = s[axis];
  *inner = i;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise binary ops (identical shapes).

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  detail::same_tape(a, b, "add");
  check_same_shape(a.shape(), b.shape(), "add");
  Tape<T>& tp = *a.tape;
  Tensor<T> out(a.shape());
  kernels::add(a.value().data(), b.value().data(), out.data(), out.size());
  int ia = a.id, ib = b.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia, ib},
      [ia, ib](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        if (t.node(ia).needs_grad)
          kernels::axpy(T(1), g.data(), t.grad(ia).data(), g.size());
        if (t.node(ib).needs_grad)
          kernels::axpy(T(1), g.data(), t.grad(ib).data(), g.size());
      },
      "add"));
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
  detail::same_tape(a, b, "sub");
  check_same_shape(a.shape(), b.shape(), "sub");
  Tape<T>& tp = *a.tape;
  Tensor<T> out(a.shape());
  kernels::sub(a.value().data(), b.value().data(), out.data(), out.size());
  int ia = a.id, ib = b.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia, ib},
      [ia, ib](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        if (t.node(ia).needs_grad)
          kernels::axpy(T(1), g.data(), t.grad(ia).data(), g.size());
        if (t.node(ib).needs_grad)
          kernels::axpy(T(-1), g.data(), t.grad(ib).data(), g.size());
      },
      "sub"));
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  detail::same_tape(a, b, "mul");
  check_same_shape(a.shape(), b.shape(), "mul");
  Tape<T>& tp = *a.tape;
  Tensor<T> out(a.shape());
  kernels::mul(a.value().data(), b.value().data(), out.data(), out.size());
  int ia = a.id, ib = b.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia, ib},
      [ia, ib](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        if (t.node(ia).needs_grad)
          kernels::mul_acc(g.data(), t.value(ib).data(), t.grad(ia).data(), g.size());
        if (t.node(ib).needs_grad)
          kernels::mul_acc(g.data(), t.value(ia).data(), t.grad(ib).data(), g.size());
      },
      "mul"));
}

template <typename T>
Var<T> scale_const(Var<T> a, T c) {
  Tape<T>& tp = *a.tape;
  Tensor<T> out = a.value();
  kernels::scale(c, out.data(), out.size());
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia, c](Tape<T>& t, int id) {
        kernels::axpy(c, t.grad(id).data(), t.grad(ia).data(), t.grad(id).size());
      },
      "scale_const"));
}

// out = x * s, s scalar-shaped.
template <typename T>
Var<T> scale_by(Var<T> x, Var<T> s) {
  detail::same_tape(x, s, "scale_by");
  if (s.value().size() != 1) throw DimError("scale_by: scale must be scalar");
  Tape<T>& tp = *x.tape;
  T sv = s.value()[0];
  Tensor<T> out = x.value();
  kernels::scale(sv, out.data(), out.size());
  int ix = x.id, is = s.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ix, is},
      [ix, is](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        T sv = t.value(is)[0];
        if (t.node(ix).needs_grad)
          kernels::axpy(sv, g.data(), t.grad(ix).data(), g.size());
        if (t.node(is).needs_grad)
          t.grad(is)[0] += kernels::dot(g.data(), t.value(ix).data(), g.size());
      },
      "scale_by"));
}

// ---------------------------------------------------------------------------
// Elementwise unary ops.

template <typename T>
Var<T> relu(Var<T> a) {
  Tape<T>& tp = *a.tape;
  Tensor<T> out(a.shape());
  const T* x = a.value().data();
  for (int64_t i = 0; i < out.size(); ++i) out[i] = x[i] > T(0) ? x[i] : T(0);
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        const Tensor<T>& x = t.value(ia);
        Tensor<T>& dx = t.grad(ia);
        for (int64_t i = 0; i < g.size(); ++i)
          if (x[i] > T(0)) dx[i] += g[i];
      },
      "relu"));
}

template <typename T>
Var<T> elu(Var<T> a) {
  Tape<T>& tp = *a.tape;
  Tensor<T> out(a.shape());
  const T* x = a.value().data();
  for (int64_t i = 0; i < out.size(); ++i)
    out[i] = x[i] > T(0) ? x[i] : std::expm1(x[i]);
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        const Tensor<T>& x = t.value(ia);
        const Tensor<T>& y = t.value(id);
        Tensor<T>& dx = t.grad(ia);
        for (int64_t i = 0; i < g.size(); ++i)
          dx[i] += g[i] * (x[i] > T(0) ? T(1) : y[i] + T(1));
      },
      "elu"));
}

template <typename T>
Var<T> sigmoid(Var<T> a) {
  Tape<T>& tp = *a.tape;
  Tensor<T> out(a.shape());
  const T* x = a.value().data();
  for (int64_t i = 0; i < out.size(); ++i) out[i] = T(1) / (T(1) + std::exp(-x[i]));
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        const Tensor<T>& y = t.value(id);
        Tensor<T>& dx = t.grad(ia);
        for (int64_t i = 0; i < g.size(); ++i) dx[i] += g[i] * y[i] * (T(1) - y[i]);
      },
      "sigmoid"));
}

template <typename T>
Var<T> add_const(Var<T> a, T c) {
  Tape<T>& tp = *a.tape;
  Tensor<T> out = a.value();
  for (int64_t i = 0; i < out.size(); ++i) out[i] += c;
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia](Tape<T>& t, int id) {
        kernels::axpy(T(1), t.grad(id).data(), t.grad(ia).data(), t.grad(id).size());
      },
      "add_const"));
}

// Natural log; non-positive inputs surface as the tape's finite check.
template <typename T>
Var<T> log_op(Var<T> a) {
  Tape<T>& tp = *a.tape;
  Tensor<T> out(a.shape());
  const T* x = a.value().data();
  for (int64_t i = 0; i < out.size(); ++i) out[i] = std::log(x[i]);
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        const Tensor<T>& x = t.value(ia);
        Tensor<T>& dx = t.grad(ia);
        for (int64_t i = 0; i < g.size(); ++i) dx[i] += g[i] / x[i];
      },
      "log"));
}

// out = 1 / (x + eps)
template <typename T>
Var<T> recip_eps(Var<T> a, T eps) {
  Tape<T>& tp = *a.tape;
  Tensor<T> out(a.shape());
  const T* x = a.value().data();
  for (int64_t i = 0; i < out.size(); ++i) out[i] = T(1) / (x[i] + eps);
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        const Tensor<T>& y = t.value(id);
        Tensor<T>& dx = t.grad(ia);
        for (int64_t i = 0; i < g.size(); ++i) dx[i] -= g[i] * y[i] * y[i];
      },
      "recip_eps"));
}

// ---------------------------------------------------------------------------
// Reductions.

template <typename T>
Var<T> sum_all(Var<T> a) {
  Tape<T>& tp = *a.tape;
  Tensor<T> out = Tensor<T>::scalar(kernels::sum(a.value().data(), a.value().size()));
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia](Tape<T>& t, int id) {
        T g = t.grad(id)[0];
        Tensor<T>& dx = t.grad(ia);
        for (int64_t i = 0; i < dx.size(); ++i) dx[i] += g;
      },
      "sum_all"));
}

template <typename T>
Var<T> dot_all(Var<T> a, Var<T> b) {
  return sum_all(mul(a, b));
}

// ---------------------------------------------------------------------------
// Structural ops.

template <typename T>
Var<T> reshape(Var<T> a, Shape new_shape) {
  if (numel(new_shape) != a.value().size()) {
    throw DimError("reshape: element count mismatch " + shape_str(a.shape()) + " -> " +
                   shape_str(new_shape));
  }
  Tape<T>& tp = *a.tape;
  Tensor<T> out(new_shape, a.value().vec());
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia](Tape<T>& t, int id) {
        kernels::axpy(T(1), t.grad(id).data(), t.grad(ia).data(), t.grad(id).size());
      },
      "reshape"));
}

namespace detail {

template <typename T>
void permute_raw(const Tensor<T>& in, const std::vector<size_t>& axes, Tensor<T>* out,
                 bool accumulate) {
  const Shape& is = in.shape();
  size_t r = is.size();
  std::vector<int64_t> istrides(r, 1);
  for (size_t k = r; k-- > 1;) istrides[k - 1] = istrides[k] * is[k];
  Shape os(r);
  for (size_t k = 0; k < r; ++k) os[k] = is[axes[k]];
  std::vector<int64_t> map(r);  // stride in input for each output axis
  for (size_t k = 0; k < r; ++k) map[k] = istrides[axes[k]];
  std::vector<int64_t> idx(r, 0);
  const T* src = in.data();
  T* dst = out->data();
  int64_t n = in.size();
  int64_t in_off = 0;
  for (int64_t o = 0; o < n; ++o) {
    if (accumulate) {
      dst[o] += src[in_off];
    } else {
      dst[o] = src[in_off];
    }
    for (size_t k = r; k-- > 0;) {
      ++idx[k];
      in_off += map[k];
      if (idx[k] < os[k]) break;
      in_off -= map[k] * os[k];
      idx[k] = 0;
    }
  }
}

}  // namespace detail

template <typename T>
Var<T> permute(Var<T> a, std::vector<size_t> axes) {
  const Shape& is = a.shape();
  if (axes.size() != is.size()) throw DimError("permute: axes rank mismatch");
  Shape os(is.size());
  for (size_t k = 0; k < axes.size(); ++k) os[k] = is.at(axes[k]);
  Tape<T>& tp = *a.tape;
  Tensor<T> out(os);
  detail::permute_raw(a.value(), axes, &out, false);
  int ia = a.id;
  std::vector<size_t> inv(axes.size());
  for (size_t k = 0; k < axes.size(); ++k) inv[axes[k]] = k;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia, inv](Tape<T>& t, int id) {
        detail::permute_raw(t.grad(id), inv, &t.grad(ia), true);
      },
      "permute"));
}

template <typename T>
Var<T> transpose2d(Var<T> a) {
  if (a.rank() != 2) throw DimError("transpose2d: rank-2 required");
  return permute(a, {1, 0});
}

template <typename T>
Var<T> narrow(Var<T> a, size_t axis, int64_t start, int64_t len) {
  const Shape& is = a.shape();
  int64_t outer, mid, inner;
  detail::axis_split(is, axis, &outer, &mid, &inner);
  if (start < 0 || len < 0 || start + len > mid) {
    throw DimError("narrow: range out of bounds");
  }
  Shape os = is;
  os[axis] = len;
  Tape<T>& tp = *a.tape;
  Tensor<T> out(os);
  const T* src = a.value().data();
  T* dst = out.data();
  for (int64_t o = 0; o < outer; ++o) {
    std::memcpy(dst + o * len * inner, src + (o * mid + start) * inner,
                static_cast<size_t>(len * inner) * sizeof(T));
  }
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia, axis, start, len](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        Tensor<T>& dx = t.grad(ia);
        int64_t outer, mid, inner;
        detail::axis_split(dx.shape(), axis, &outer, &mid, &inner);
        for (int64_t o = 0; o < outer; ++o) {
          kernels::axpy(T(1), g.data() + o * len * inner,
                        dx.data() + (o * mid + start) * inner, len * inner);
        }
      },
      "narrow"));
}

template <typename T>
Var<T> concat(const std::vector<Var<T>>& parts, size_t axis) {
  if (parts.empty()) throw DimError("concat: no inputs");
  Tape<T>& tp = *parts[0].tape;
  const Shape& s0 = parts[0].shape();
  Shape os = s0;
  int64_t total = 0;
  for (const Var<T>& p : parts) {
    const Shape& ps = p.shape();
    if (ps.size() != s0.size()) throw DimError("concat: rank mismatch");
    for (size_t k = 0; k < ps.size(); ++k) {
      if (k != axis && ps[k] != s0[k]) throw DimError("concat: shape mismatch");
    }
    total += ps[axis];
  }
  os[axis] = total;
  Tensor<T> out(os);
  int64_t outer, mid, inner;
  detail::axis_split(os, axis, &outer, &mid, &inner);
  std::vector<int> pids;
  std::vector<int64_t> offs;
  int64_t off = 0;
  T* dst = out.data();
  for (const Var<T>& p : parts) {
    int64_t pm = p.shape()[axis];
    const T* src = p.value().data();
    for (int64_t o = 0; o < outer; ++o) {
      std::memcpy(dst + (o * mid + off) * inner, src + o * pm * inner,
                  static_cast<size_t>(pm * inner) * sizeof(T));
    }
    pids.push_back(p.id);
    offs.push_back(off);
    off += pm;
  }
  return tp.wrap(tp.emit_op(
      std::move(out), pids,
      [pids, offs, axis](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        int64_t outer, mid, inner;
        detail::axis_split(g.shape(), axis, &outer, &mid, &inner);
        for (size_t k = 0; k < pids.size(); ++k) {
          if (!t.node(pids[k]).needs_grad) continue;
          Tensor<T>& dx = t.grad(pids[k]);
          int64_t pm = dx.shape()[axis];
          for (int64_t o = 0; o < outer; ++o) {
            kernels::axpy(T(1), g.data() + (o * mid + offs[k]) * inner,
                          dx.data() + o * pm * inner, pm * inner);
          }
        }
      },
      "concat"));
}

// Insert a tiled axis of size n at position 1: (A, rest...) -> (A, n, rest...).
template <typename T>
Var<T> tile_axis1(Var<T> a, int64_t n) {
  const Shape& is = a.shape();
  if (is.empty()) throw DimError("tile_axis1: rank >= 1 required");
  Shape os;
  os.push_back(is[0]);
  os.push_back(n);
  for (size_t k = 1; k < is.size(); ++k) os.push_back(is[k]);
  int64_t rest = 1;
  for (size_t k = 1; k < is.size(); ++k) rest *= is[k];
  Tape<T>& tp = *a.tape;
  Tensor<T> out(os);
  const T* src = a.value().data();
  T* dst = out.data();
  for (int64_t a0 = 0; a0 < is[0]; ++a0) {
    for (int64_t j = 0; j < n; ++j) {
      std::memcpy(dst + (a0 * n + j) * rest, src + a0 * rest,
                  static_cast<size_t>(rest) * sizeof(T));
    }
  }
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia, n, rest](Tape<T>& t, int id) {
        const Tensor<T>& g = t.grad(id);
        Tensor<T>& dx = t.grad(ia);
        int64_t a0n = dx.shape()[0];
        for (int64_t a0 = 0; a0 < a0n; ++a0) {
          for (int64_t j = 0; j < n; ++j) {
            kernels::axpy(T(1), g.data() + (a0 * n + j) * rest, dx.data() + a0 * rest,
                          rest);
          }
        }
      },
      "tile_axis1"));
}

// x + broadcast(bias) where bias (a plain tensor, not differentiated) has a
// shape equal to the trailing dims of x.
template <typename T>
Var<T> add_bcast_trailing(Var<T> x, const Tensor<T>& bias) {
  const Shape& xs = x.shape();
  const Shape& bs = bias.shape();
  if (bs.size() > xs.size()) throw DimError("add_bcast_trailing: bias rank too large");
  for (size_t k = 0; k < bs.size(); ++k) {
    if (bs[k] != xs[xs.size() - bs.size() + k])
      throw DimError("add_bcast_trailing: trailing shape mismatch");
  }
  int64_t bn = bias.size();
  Tape<T>& tp = *x.tape;
  Tensor<T> out = x.value();
  int64_t reps = out.size() / bn;
  for (int64_t r = 0; r < reps; ++r)
    kernels::axpy(T(1), bias.data(), out.data() + r * bn, bn);
  int ix = x.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ix},
      [ix](Tape<T>& t, int id) {
        kernels::axpy(T(1), t.grad(id).data(), t.grad(ix).data(), t.grad(id).size());
      },
      "add_bcast_trailing"));
}

// ---------------------------------------------------------------------------
// Matrix products.

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  detail::same_tape(a, b, "matmul");
  if (a.rank() != 2 || b.rank() != 2) throw DimError("matmul: rank-2 required");
  int64_t m = a.dim(0), k = a.dim(1), k2 = b.dim(0), n = b.dim(1);
  if (k != k2)
    throw DimError("matmul: inner dims differ " + shape_str(a.shape()) + " vs " +
                   shape_str(b.shape()));
  Tape<T>& tp = *a.tape;
  Tensor<T> out({m, n});
  const T* A = a.value().data();
  const T* B = b.value().data();
  T* C = out.data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t l = 0; l < k; ++l) {
      kernels::axpy(A[i * k + l], B + l * n, C + i * n, n);
    }
  }
  int ia = a.id, ib = b.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia, ib},
      [ia, ib, m, k, n](Tape<T>& t, int id) {
        const T* G = t.grad(id).data();
        if (t.node(ia).needs_grad) {
          T* dA = t.grad(ia).data();
          const T* B = t.value(ib).data();
          for (int64_t i = 0; i < m; ++i)
            for (int64_t l = 0; l < k; ++l)
              dA[i * k + l] += kernels::dot(G + i * n, B + l * n, n);
        }
        if (t.node(ib).needs_grad) {
          T* dB = t.grad(ib).data();
          const T* A = t.value(ia).data();
          for (int64_t i = 0; i < m; ++i)
            for (int64_t l = 0; l < k; ++l)
              kernels::axpy(A[i * k + l], G + i * n, dB + l * n, n);
        }
      },
      "matmul"));
}

// x (..., Din) * w (Din, Dout) applied along the last axis.
template <typename T>
Var<T> matmul_lastdim(Var<T> x, Var<T> w) {
  if (w.rank() != 2) throw DimError("matmul_lastdim: weight must be rank 2");
  // Copy: the node vector may reallocate when reshape/matmul emit below.
  Shape xs = x.shape();
  if (xs.empty() || xs.back() != w.dim(0))
    throw DimError("matmul_lastdim: trailing dim mismatch");
  int64_t rows = x.value().size() / xs.back();
  Var<T> flat = reshape(x, {rows, xs.back()});
  Var<T> y = matmul(flat, w);
  Shape os = xs;
  os.back() = w.dim(1);
  return reshape(y, os);
}

// out[..., c, :] = sum_c' A[c, c'] * x[..., c', :], A a fixed matrix.
// `transpose` applies A^T instead.
template <typename T>
Var<T> adjacency_mix(Var<T> x, const Tensor<T>& adj, bool transpose = false) {
  const Shape& xs = x.shape();
  if (xs.size() < 2) throw DimError("adjacency_mix: rank >= 2 required");
  if (adj.rank() != 2 || adj.dim(0) != adj.dim(1))
    throw DimError("adjacency_mix: adjacency must be square");
  int64_t c = xs[xs.size() - 2];
  int64_t d = xs[xs.size() - 1];
  if (adj.dim(0) != c) throw DimError("adjacency_mix: node count mismatch");
  int64_t slabs = x.value().size() / (c * d);
  Tape<T>& tp = *x.tape;
  Tensor<T> out(xs);
  const T* src = x.value().data();
  T* dst = out.data();
  for (int64_t s = 0; s < slabs; ++s) {
    const T* xm = src + s * c * d;
    T* om = dst + s * c * d;
    for (int64_t i = 0; i < c; ++i) {
      for (int64_t j = 0; j < c; ++j) {
        T aij = transpose ? adj.at(j, i) : adj.at(i, j);
        if (aij == T(0)) continue;  // keep zero edges bitwise-inert
        kernels::axpy(aij, xm + j * d, om + i * d, d);
      }
    }
  }
  int ix = x.id;
  Tensor<T> adj_copy = adj;
  bool tr = transpose;
  return tp.wrap(tp.emit_op(
      std::move(out), {ix},
      [ix, adj_copy, tr, c, d, slabs](Tape<T>& t, int id) {
        const T* g = t.grad(id).data();
        T* dx = t.grad(ix).data();
        for (int64_t s = 0; s < slabs; ++s) {
          const T* gm = g + s * c * d;
          T* dm = dx + s * c * d;
          for (int64_t i = 0; i < c; ++i) {
            for (int64_t j = 0; j < c; ++j) {
              // adjoint: flip the transpose flag
              T aij = tr ? adj_copy.at(i, j) : adj_copy.at(j, i);
              if (aij == T(0)) continue;
              kernels::axpy(aij, gm + j * d, dm + i * d, d);
            }
          }
        }
      },
      "adjacency_mix"));
}

// ---------------------------------------------------------------------------
// Softmax over the rows of a 2-D tensor.

template <typename T>
Var<T> softmax_rows(Var<T> a) {
  if (a.rank() != 2) throw DimError("softmax_rows: rank-2 required");
  int64_t rows = a.dim(0), cols = a.dim(1);
  if (cols == 0) throw LengthError("softmax_rows: empty rows");
  Tape<T>& tp = *a.tape;
  Tensor<T> out(a.shape());
  const T* x = a.value().data();
  T* y = out.data();
  for (int64_t i = 0; i < rows; ++i) {
    const T* xr = x + i * cols;
    T* yr = y + i * cols;
    T m = xr[0];
    for (int64_t j = 1; j < cols; ++j) m = std::max(m, xr[j]);
    T s = T(0);
    for (int64_t j = 0; j < cols; ++j) {
      yr[j] = std::exp(xr[j] - m);
      s += yr[j];
    }
    kernels::scale(T(1) / s, yr, cols);
  }
  int ia = a.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ia},
      [ia, rows, cols](Tape<T>& t, int id) {
        const T* g = t.grad(id).data();
        const T* y = t.value(id).data();
        T* dx = t.grad(ia).data();
        for (int64_t i = 0; i < rows; ++i) {
          const T* gr = g + i * cols;
          const T* yr = y + i * cols;
          T* dr = dx + i * cols;
          T dotgy = kernels::dot(gr, yr, cols);
          for (int64_t j = 0; j < cols; ++j) dr[j] += yr[j] * (gr[j] - dotgy);
        }
      },
      "softmax_rows"));
}

// out[i, :] = x[i, :] * s[i], s a length-L vector.
template <typename T>
Var<T> rows_scale(Var<T> x, Var<T> s) {
  detail::same_tape(x, s, "rows_scale");
  if (x.rank() != 2) throw DimError("rows_scale: rank-2 required");
  int64_t rows = x.dim(0), cols = x.dim(1);
  if (s.value().size() != rows) throw DimError("rows_scale: scale length mismatch");
  Tape<T>& tp = *x.tape;
  Tensor<T> out(x.shape());
  const T* xp = x.value().data();
  const T* sp = s.value().data();
  T* op = out.data();
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < cols; ++j) op[i * cols + j] = xp[i * cols + j] * sp[i];
  }
  int ix = x.id, is = s.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ix, is},
      [ix, is, rows, cols](Tape<T>& t, int id) {
        const T* g = t.grad(id).data();
        const T* sp = t.value(is).data();
        const T* xp = t.value(ix).data();
        if (t.node(ix).needs_grad) {
          T* dx = t.grad(ix).data();
          for (int64_t i = 0; i < rows; ++i)
            kernels::axpy(sp[i], g + i * cols, dx + i * cols, cols);
        }
        if (t.node(is).needs_grad) {
          T* ds = t.grad(is).data();
          for (int64_t i = 0; i < rows; ++i)
            ds[i] += kernels::dot(g + i * cols, xp + i * cols, cols);
        }
      },
      "rows_scale"));
}

// ---------------------------------------------------------------------------
// Linear time interpolation (B, C, Din) -> (B, C, Dout), align-corners.

template <typename T>
Var<T> interp_time(Var<T> x, int64_t d_out) {
  if (x.rank() != 3) throw DimError("interp_time: rank-3 required");
  int64_t b = x.dim(0), c = x.dim(1), d_in = x.dim(2);
  if (d_in < 1 || d_out < 1) throw LengthError("interp_time: empty time axis");
  Tape<T>& tp = *x.tape;
  Tensor<T> out({b, c, d_out});
  // Sample positions; for a single output frame take the middle.
  std::vector<int64_t> i0(d_out);
  std::vector<T> w1(d_out);
  for (int64_t j = 0; j < d_out; ++j) {
    double pos = (d_out == 1) ? 0.5 * (d_in - 1)
                              : static_cast<double>(j) * (d_in - 1) / (d_out - 1);
    int64_t lo = static_cast<int64_t>(pos);
    if (lo > d_in - 2) lo = std::max<int64_t>(0, d_in - 2);
    i0[j] = lo;
    w1[j] = d_in == 1 ? T(0) : static_cast<T>(pos - static_cast<double>(lo));
  }
  const T* xp = x.value().data();
  T* op = out.data();
  for (int64_t r = 0; r < b * c; ++r) {
    const T* row = xp + r * d_in;
    T* orow = op + r * d_out;
    for (int64_t j = 0; j < d_out; ++j) {
      int64_t lo = i0[j];
      T w = w1[j];
      T hi_val = (lo + 1 < d_in) ? row[lo + 1] : row[lo];
      orow[j] = (T(1) - w) * row[lo] + w * hi_val;
    }
  }
  int ix = x.id;
  return tp.wrap(tp.emit_op(
      std::move(out), {ix},
      [ix, b, c, d_in, d_out, i0, w1](Tape<T>& t, int id) {
        const T* g = t.grad(id).data();
        T* dx = t.grad(ix).data();
        for (int64_t r = 0; r < b * c; ++r) {
          const T* grow = g + r * d_out;
          T* drow = dx + r * d_in;
          for (int64_t j = 0; j < d_out; ++j) {
            int64_t lo = i0[j];
            T w = w1[j];
            drow[lo] += (T(1) - w) * grow[j];
            if (lo + 1 < d_in) {
              drow[lo + 1] += w * grow[j];
            } else {
              drow[lo] += w * grow[j];
            }
          }
        }
      },
      "interp_time"));
}

}  // namespace eegsep::nn

#endif  // EEGSEP_NN_OPS_H_
