// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_TRAIN_ADAM_H_
#define EEGSEP_TRAIN_ADAM_H_

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "nn/registry.h"

namespace eegsep::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment gradient descent with bias correction. Moment tensors are
// created lazily per parameter, so parameters that first appear mid-training
// (lazy registry creation) start from zero moments.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  void step(nn::ParamRegistry<double>& reg, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (auto& [name, p] : reg.params()) {
      const nn::Tensor<double>& g = reg.grad(name);
      nn::Tensor<double>& m = state(m_, name, p.shape());
      nn::Tensor<double>& v = state(v_, name, p.shape());
      for (int64_t i = 0; i < p.size(); ++i) {
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
        p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.eps);
      }
    }
  }

  int64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  std::map<std::string, nn::Tensor<double>>& moments_m() { return m_; }
  std::map<std::string, nn::Tensor<double>>& moments_v() { return v_; }
  const std::map<std::string, nn::Tensor<double>>& moments_m() const { return m_; }
  const std::map<std::string, nn::Tensor<double>>& moments_v() const { return v_; }

  void restore(std::map<std::string, nn::Tensor<double>> m,
               std::map<std::string, nn::Tensor<double>> v, int64_t steps) {
    m_ = std::move(m);
    v_ = std::move(v);
    t_ = steps;
  }

 private:
  nn::Tensor<double>& state(std::map<std::string, nn::Tensor<double>>& store,
                            const std::string& name, const nn::Shape& shape) {
    auto it = store.find(name);
    if (it == store.end()) it = store.emplace(name, nn::Tensor<double>(shape)).first;
    return it->second;
  }

  AdamConfig cfg_;
  int64_t t_ = 0;
  std::map<std::string, nn::Tensor<double>> m_, v_;
};

}  // namespace eegsep::train

#endif  // EEGSEP_TRAIN_ADAM_H_
