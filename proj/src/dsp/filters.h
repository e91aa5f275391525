// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// IIR filter design (Butterworth bandpass/lowpass via bilinear transform,
// RBJ notch) and zero-phase forward-backward application in second-order
// sections. Zero phase keeps EEG/audio alignment free of group delay.

#ifndef EEGSEP_DSP_FILTERS_H_
#define EEGSEP_DSP_FILTERS_H_

#include <cstdint>
#include <vector>

namespace eegsep::dsp {

// One second-order section, a0 normalized to 1:
//   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;
};

// Butterworth bandpass from an order-N analog prototype (2N poles, N
// second-order sections), bilinear transform with edge prewarping. Unity
// gain at the geometric center frequency. Throws ConfigError on invalid
// edges or a numerically unstable result.
std::vector<Biquad> butter_bandpass(int order, double lo_hz, double hi_hz, double fs);

// Butterworth lowpass, order-N prototype, exact unity DC gain.
std::vector<Biquad> butter_lowpass(int order, double fc_hz, double fs);

// RBJ cookbook notch: unity gain far from f0, null at f0.
Biquad design_notch(double f0_hz, double q, double fs);

// |H(e^{j 2 pi f / fs})| of a cascade (single pass).
double sos_gain_at(const std::vector<Biquad>& sos, double f_hz, double fs);

// Zero-phase filtering: forward-backward passes with odd-reflection padding
// and step-steady-state initial conditions, averaged over both processing
// directions so the result commutes exactly with time reversal. Output
// length equals input length.
std::vector<double> sosfiltfilt(const std::vector<Biquad>& sos,
                                const std::vector<double>& x);

// Convenience wrappers with the preprocessing defaults.
std::vector<double> bandpass(const std::vector<double>& x, double fs, double lo_hz = 0.1,
                             double hi_hz = 45.0, int order = 4);
std::vector<double> notch(const std::vector<double>& x, double fs, double f0_hz = 50.0,
                          double q = 30.0);

// Rectify-and-smooth amplitude envelope: |x| low-passed at smooth_hz
// (zero phase), clamped nonnegative.
std::vector<double> envelope(const std::vector<double>& x, double fs, double smooth_hz);

}  // namespace eegsep::dsp

#endif  // EEGSEP_DSP_FILTERS_H_
