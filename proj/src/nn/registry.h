// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Named parameter store plus the per-forward workspace that binds parameters
// onto a fresh tape. Parameters are created lazily on first use with a
// per-name deterministic RNG, so initialization does not depend on creation
// order. std::map keeps iteration (and thus serialization) order stable.

#ifndef EEGSEP_NN_REGISTRY_H_
#define EEGSEP_NN_REGISTRY_H_

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "common/rng.h"
#include "kernels/kernels.h"
#include "nn/tape.h"

namespace eegsep::nn {

template <typename T>
class ParamRegistry {
 public:
  explicit ParamRegistry(uint64_t seed = 0) : seed_(seed) {}

  // Fetch or create a trainable tensor initialized uniform +-1/sqrt(fan_in).
  Tensor<T>& param_uniform(const std::string& name, Shape shape, int64_t fan_in) {
    auto it = params_.find(name);
    if (it != params_.end()) {
      check_same_shape(it->second.shape(), shape, ("param " + name).c_str());
      return it->second;
    }
    if (fan_in < 1) throw ValueError("param_uniform: fan_in >= 1 required");
    Tensor<T> t(shape);
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Rng rng(seed_ ^ fnv1a64(name.data(), name.size()));
    for (int64_t i = 0; i < t.size(); ++i)
      t[i] = static_cast<T>(rng.uniform(-bound, bound));
    return insert(name, std::move(t));
  }

  // Fetch or create a trainable tensor filled with a constant.
  Tensor<T>& param_const(const std::string& name, Shape shape, T value) {
    auto it = params_.find(name);
    if (it != params_.end()) {
      check_same_shape(it->second.shape(), shape, ("param " + name).c_str());
      return it->second;
    }
    Tensor<T> t(shape);
    t.fill(value);
    return insert(name, std::move(t));
  }

  // Non-trainable persistent state (e.g. BN running statistics).
  Tensor<T>& buffer(const std::string& name, Shape shape, T fill_value) {
    auto it = buffers_.find(name);
    if (it != buffers_.end()) {
      check_same_shape(it->second.shape(), shape, ("buffer " + name).c_str());
      return it->second;
    }
    Tensor<T> t(shape);
    t.fill(fill_value);
    auto [pos, ok] = buffers_.emplace(name, std::move(t));
    (void)ok;
    return pos->second;
  }

  bool has_param(const std::string& name) const { return params_.count(name) > 0; }
  Tensor<T>& param(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ValueError("unknown param: " + name);
    return it->second;
  }
  Tensor<T>& grad(const std::string& name) {
    auto it = grads_.find(name);
    if (it == grads_.end()) throw ValueError("unknown grad: " + name);
    return it->second;
  }

  std::map<std::string, Tensor<T>>& params() { return params_; }
  const std::map<std::string, Tensor<T>>& params() const { return params_; }
  std::map<std::string, Tensor<T>>& buffers() { return buffers_; }
  const std::map<std::string, Tensor<T>>& buffers() const { return buffers_; }
  std::map<std::string, Tensor<T>>& grads() { return grads_; }

  void zero_grads() {
    for (auto& [name, g] : grads_) g.fill(T(0));
  }

  int64_t num_trainable() const {
    int64_t n = 0;
    for (const auto& [name, p] : params_) n += p.size();
    return n;
  }

  // Global L2 norm of all accumulated gradients.
  double grad_norm() const {
    double sq = 0;
    for (const auto& [name, g] : grads_)
      sq += static_cast<double>(kernels::sum_sq(g.data(), g.size()));
    return std::sqrt(sq);
  }

  void scale_grads(T factor) {
    for (auto& [name, g] : grads_) kernels::scale(factor, g.data(), g.size());
  }

  uint64_t seed() const { return seed_; }

 private:
  Tensor<T>& insert(const std::string& name, Tensor<T> t) {
    grads_.emplace(name, Tensor<T>(t.shape()));
    auto [pos, ok] = params_.emplace(name, std::move(t));
    (void)ok;
    return pos->second;
  }

  uint64_t seed_;
  std::map<std::string, Tensor<T>> params_;
  std::map<std::string, Tensor<T>> grads_;
  std::map<std::string, Tensor<T>> buffers_;
};

// One forward/backward pass: binds registry parameters as tape leaves and
// funnels node gradients back into the registry on backward().
template <typename T>
class Workspace {
 public:
  explicit Workspace(ParamRegistry<T>* reg) : reg_(reg) {}

  Tape<T>& tape() { return tape_; }
  ParamRegistry<T>& registry() { return *reg_; }

  Var<T> param_uniform(const std::string& name, Shape shape, int64_t fan_in) {
    return bind(name, reg_->param_uniform(name, shape, fan_in));
  }
  Var<T> param_const(const std::string& name, Shape shape, T value) {
    return bind(name, reg_->param_const(name, shape, value));
  }
  Tensor<T>& buffer(const std::string& name, Shape shape, T fill_value) {
    return reg_->buffer(name, shape, fill_value);
  }

  // Non-trainable network input.
  Var<T> input(Tensor<T> t) { return tape_.constant(std::move(t), "input"); }

  // Run backward from a scalar loss and accumulate parameter gradients.
  void backward(Var<T> loss) {
    tape_.backward(loss);
    for (const auto& [name, id] : bound_) {
      Tensor<T>& dst = reg_->grad(name);
      const Tensor<T>& src = tape_.grad(id);
      kernels::axpy(T(1), src.data(), dst.data(), dst.size());
    }
  }

 private:
  Var<T> bind(const std::string& name, const Tensor<T>& value) {
    auto it = bound_.find(name);
    if (it != bound_.end()) return Var<T>{&tape_, it->second};
    Var<T> v = tape_.leaf(value, true, "param");
    bound_.emplace(name, v.id);
    return v;
  }

  ParamRegistry<T>* reg_;
  Tape<T> tape_;
  std::map<std::string, int> bound_;
};

}  // namespace eegsep::nn

#endif  // EEGSEP_NN_REGISTRY_H_
