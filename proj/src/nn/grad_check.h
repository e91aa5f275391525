// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Finite-difference gradient verification. Used double-precision only: the
// central difference with h = 1e-5 leaves ~1e-10 of truncation + roundoff
// headroom against the 1e-6 relative tolerance.

#ifndef EEGSEP_NN_GRAD_CHECK_H_
#define EEGSEP_NN_GRAD_CHECK_H_

#include <functional>
#include <string>

#include "nn/registry.h"

namespace eegsep::nn {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  int64_t worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  int64_t checked = 0;
};

// forward() must build a fresh workspace over `reg`, run the model and
// return the scalar loss value; it is invoked repeatedly with perturbed
// parameters. `analytic_pass` runs one backward and fills reg grads.
inline GradCheckReport grad_check(
    ParamRegistry<double>& reg, const std::function<double()>& forward_value,
    const std::function<void()>& analytic_pass, double h = 1e-5) {
  reg.zero_grads();
  analytic_pass();
  GradCheckReport rep;
  for (auto& [name, p] : reg.params()) {
    Tensor<double>& g = reg.grad(name);
    for (int64_t i = 0; i < p.size(); ++i) {
      double saved = p[i];
      p[i] = saved + h;
      double lp = forward_value();
      p[i] = saved - h;
      double lm = forward_value();
      p[i] = saved;
      double fd = (lp - lm) / (2.0 * h);
      double an = g[i];
      double rel = std::abs(fd - an) / std::max(1e-4, std::abs(fd) + std::abs(an));
      ++rep.checked;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_param = name;
        rep.worst_index = i;
        rep.analytic = an;
        rep.numeric = fd;
      }
    }
  }
  return rep;
}

}  // namespace eegsep::nn

#endif  // EEGSEP_NN_GRAD_CHECK_H_
