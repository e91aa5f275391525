// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Reverse-mode autodiff over a per-forward tape. Nodes are appended in
// evaluation order (so the tape is already topologically sorted) and
// backward() walks them once in reverse. No higher-order gradients.

#ifndef EEGSEP_NN_TAPE_H_
#define EEGSEP_NN_TAPE_H_

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nn/tensor.h"

namespace eegsep::nn {

template <typename T>
class Tape;

// Lightweight handle into a tape. Valid for the lifetime of its tape.
template <typename T>
struct Var {
  Tape<T>* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Tensor<T>& value() const;
  const Tensor<T>& grad() const;
  const Shape& shape() const { return value().shape(); }
  int64_t dim(size_t i) const { return value().shape().at(i); }
  size_t rank() const { return value().rank(); }
};

template <typename T>
class Tape {
 public:
  using BackFn = std::function<void(Tape<T>&, int)>;

  struct Node {
    Tensor<T> value;
    Tensor<T> grad;  // allocated iff needs_grad
    std::vector<int> parents;
    BackFn back;
    bool needs_grad = false;
    const char* tag = "";
  };

  // When enabled (default), every op output is scanned and a non-finite
  // value raises ValueError instead of propagating.
  void set_check_finite(bool on) { check_finite_ = on; }
  bool check_finite() const { return check_finite_; }

  Var<T> leaf(Tensor<T> v, bool needs_grad, const char* tag = "leaf") {
    return wrap(emit(std::move(v), {}, nullptr, needs_grad, tag));
  }
  Var<T> constant(Tensor<T> v, const char* tag = "const") {
    return wrap(emit(std::move(v), {}, nullptr, false, tag));
  }

  int emit(Tensor<T> value, std::vector<int> parents, BackFn back, bool needs_grad,
           const char* tag) {
    if (check_finite_ && !value.all_finite()) {
      throw ValueError(std::string("non-finite values produced by op '") + tag + "'");
    }
    Node n;
    n.grad = needs_grad ? Tensor<T>(value.shape()) : Tensor<T>();
    n.value = std::move(value);
    n.parents = std::move(parents);
    n.back = std::move(back);
    n.needs_grad = needs_grad;
    n.tag = tag;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  // Emit helper that derives needs_grad from the parents.
  int emit_op(Tensor<T> value, std::vector<int> parents, BackFn back, const char* tag) {
    bool needs = false;
    for (int p : parents) needs = needs || nodes_[p].needs_grad;
    return emit(std::move(value), std::move(parents), needs ? std::move(back) : nullptr,
                needs, tag);
  }

  Var<T> wrap(int id) { return Var<T>{this, id}; }

  Node& node(int id) { return nodes_[static_cast<size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  Tensor<T>& value(int id) { return nodes_[static_cast<size_t>(id)].value; }
  Tensor<T>& grad(int id) { return nodes_[static_cast<size_t>(id)].grad; }
  size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
  // needs_grad node reachable from `loss`. `loss` must be scalar-shaped.
  void backward(Var<T> loss) {
    if (loss.tape != this) throw ValueError("backward: var belongs to another tape");
    Node& ln = node(loss.id);
    if (ln.value.size() != 1) {
      throw DimError("backward: loss must be scalar, got " + shape_str(ln.value.shape()));
    }
    if (!ln.needs_grad) return;  // nothing to do: no parameters involved
    ln.grad[0] = T(1);
    for (int id = loss.id; id >= 0; --id) {
      Node& n = nodes_[static_cast<size_t>(id)];
      if (n.needs_grad && n.back) n.back(*this, id);
    }
  }

 private:
  std::vector<Node> nodes_;
  bool check_finite_ = true;
};

template <typename T>
const Tensor<T>& Var<T>::value() const {
  return tape->value(id);
}

template <typename T>
const Tensor<T>& Var<T>::grad() const {
  return tape->grad(id);
}

}  // namespace eegsep::nn

#endif  // EEGSEP_NN_TAPE_H_
