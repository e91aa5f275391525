// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dsp/fft.h"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "common/error.h"

namespace eegsep::dsp {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftR2C::FftR2C(int64_t n) : n_(n) {
  if (n < 1) throw LengthError("FftR2C: size >= 1 required");
  in_buf_ = fftw_alloc_real(static_cast<size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
  out_buf_ = out;
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_buf_, out, FFTW_ESTIMATE);
  if (plan_ == nullptr) throw Error("FftR2C: planner failed");
}

FftR2C::~FftR2C() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(in_buf_);
  fftw_free(out_buf_);
}

void FftR2C::run(const double* in, std::complex<double>* out) {
  std::memcpy(in_buf_, in, static_cast<size_t>(n_) * sizeof(double));
  fftw_execute(static_cast<fftw_plan>(plan_));
  const fftw_complex* ob = static_cast<const fftw_complex*>(out_buf_);
  for (int64_t k = 0; k < bins(); ++k) out[k] = {ob[k][0], ob[k][1]};
}

}  // namespace eegsep::dsp
