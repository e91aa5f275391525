// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Scale-invariant signal-to-distortion ratio. The estimate is projected onto
// the reference (alpha = <est,ref>/<ref,ref>), so any rescaling of the
// estimate cancels:
//   si_sdr = 10 log10(|alpha ref|^2 / |alpha ref - est|^2)   [dB]
// The reported metric caps at +60 dB when the residual underflows; the
// training loss is the uncapped smooth negative form.

#ifndef EEGSEP_METRICS_SI_SDR_H_
#define EEGSEP_METRICS_SI_SDR_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "common/error.h"
#include "kernels/kernels.h"
#include "nn/ops.h"

namespace eegsep {
namespace metrics {

inline constexpr double kSiSdrCapDb = 60.0;

// Reported metric, in dB, capped at +60.
inline double si_sdr_db(const double* est, const double* ref, int64_t n) {
  if (n < 1) throw LengthError("si_sdr: empty signals");
  const double rr = kernels::dot(ref, ref, n);
  if (rr == 0.0) throw ValueError("si_sdr: reference signal is all zero");
  const double alpha = kernels::dot(est, ref, n) / rr;
  double num = 0.0, den = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double t = alpha * ref[i];
    const double r = t - est[i];
    num += t * t;
    den += r * r;
  }
  if (den == 0.0) return kSiSdrCapDb;
  const double db = 10.0 * std::log10(num / den);
  return std::min(db, kSiSdrCapDb);
}

inline double si_sdr_db(const std::vector<double>& est,
                        const std::vector<double>& ref) {
  if (est.size() != ref.size()) {
    throw DimError("si_sdr: length mismatch " + std::to_string(est.size()) +
                   " vs " + std::to_string(ref.size()));
  }
  return si_sdr_db(est.data(), ref.data(), static_cast<int64_t>(est.size()));
}

// Differentiable training loss: -si_sdr(est, ref), smooth and uncapped.
// `ref` enters as a constant; gradients flow through `est` only.
template <typename T>
nn::Var<T> si_sdr_loss(nn::Var<T> est, const nn::Tensor<T>& ref) {
  nn::check_same_shape(est.shape(), ref.shape(), "si_sdr_loss");
  const T rr = kernels::dot(ref.data(), ref.data(), ref.size());
  if (rr == T(0)) throw ValueError("si_sdr: reference signal is all zero");
  nn::Tape<T>& tp = *est.tape;
  nn::Var<T> refv = tp.constant(ref, "si_sdr_ref");
  nn::Var<T> alpha = nn::scale_const(nn::dot_all(est, refv), T(1) / rr);
  nn::Var<T> target = nn::scale_by(refv, alpha);
  nn::Var<T> resid = nn::sub(target, est);
  nn::Var<T> num = nn::dot_all(target, target);
  nn::Var<T> den = nn::dot_all(resid, resid);
  const T factor = T(-10.0 / std::log(10.0));
  return nn::scale_const(nn::sub(nn::log_op(num), nn::log_op(den)), factor);
}

}  // namespace metrics
}  // namespace eegsep

#endif  // EEGSEP_METRICS_SI_SDR_H_
