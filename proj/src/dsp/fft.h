// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Real-to-complex FFT wrapper around FFTW3. One instance per transform size;
// instances are not shareable across threads, but independent instances are.

#ifndef EEGSEP_DSP_FFT_H_
#define EEGSEP_DSP_FFT_H_

#include <complex>
#include <cstdint>

namespace eegsep::dsp {

class FftR2C {
 public:
  explicit FftR2C(int64_t n);
  ~FftR2C();
  FftR2C(const FftR2C&) = delete;
  FftR2C& operator=(const FftR2C&) = delete;

  int64_t size() const { return n_; }
  int64_t bins() const { return n_ / 2 + 1; }

  // out must hold bins() entries.
  void run(const double* in, std::complex<double>* out);

 private:
  int64_t n_;
  void* plan_;
  double* in_buf_;
  void* out_buf_;
};

}  // namespace eegsep::dsp

#endif  // EEGSEP_DSP_FFT_H_
