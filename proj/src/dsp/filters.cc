// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dsp/filters.h"

#include <algorithm>
#include <cmath>
#include <complex>

#include "common/error.h"

namespace eegsep::dsp {

namespace {

using C = std::complex<double>;

// Left-half-plane Butterworth prototype poles, cutoff 1 rad/s.
std::vector<C> butter_prototype(int order) {
  if (order < 1) throw ConfigError("butterworth: order >= 1 required");
  std::vector<C> poles;
  for (int k = 0; k < order; ++k) {
    double theta = M_PI * (2.0 * k + order + 1.0) / (2.0 * order);
    poles.emplace_back(std::cos(theta), std::sin(theta));
  }
  return poles;
}

void check_stable(const std::vector<Biquad>& sos) {
  for (const Biquad& s : sos) {
    // Strict interior of the biquad stability triangle.
    if (!(s.a2 < 1.0) || !(std::abs(s.a1) < 1.0 + s.a2)) {
      throw ConfigError("filter design numerically unstable for these parameters");
    }
  }
}

// Group 2N digital poles (closed under conjugation) into N denominator
// pairs: conjugate pairs first, leftover near-real poles in order.
std::vector<std::pair<C, C>> pair_poles(std::vector<C> poles) {
  constexpr double kTol = 1e-9;
  std::vector<std::pair<C, C>> pairs;
  std::vector<C> reals;
  std::vector<C> upper;
  for (const C& p : poles) {
    if (std::abs(p.imag()) <= kTol) {
      reals.push_back(p);
    } else if (p.imag() > 0) {
      upper.push_back(p);
    }
  }
  for (const C& p : upper) pairs.emplace_back(p, std::conj(p));
  if (reals.size() % 2 != 0) throw Error("pole pairing: odd real pole count");
  for (size_t i = 0; i + 1 < reals.size(); i += 2) pairs.emplace_back(reals[i], reals[i + 1]);
  if (pairs.size() * 2 != poles.size()) throw Error("pole pairing: conjugates lost");
  return pairs;
}

}  // namespace

std::vector<Biquad> butter_bandpass(int order, double lo_hz, double hi_hz, double fs) {
  if (!(lo_hz > 0) || !(hi_hz > lo_hz)) throw ConfigError("bandpass: need 0 < lo < hi");
  if (!(fs > 2.0 * hi_hz)) throw ConfigError("bandpass: need fs > 2*hi");
  const double fs2 = 2.0 * fs;
  const double wl = fs2 * std::tan(M_PI * lo_hz / fs);
  const double wh = fs2 * std::tan(M_PI * hi_hz / fs);
  const double w0 = std::sqrt(wl * wh);
  const double bw = wh - wl;

  // Lowpass -> bandpass: each prototype pole spawns a pair; N zeros at s=0.
  std::vector<C> apoles;
  for (const C& p : butter_prototype(order)) {
    C half = 0.5 * bw * p;
    C disc = std::sqrt(half * half - w0 * w0);
    apoles.push_back(half + disc);
    apoles.push_back(half - disc);
  }

  // Bilinear transform; accumulate the gain product.
  std::vector<C> zpoles;
  C denom(1.0, 0.0);
  for (const C& s : apoles) {
    zpoles.push_back((fs2 + s) / (fs2 - s));
    denom *= (fs2 - s);
  }
  // K = bw^N (2 fs)^N / prod(2 fs - poles); zeros map N->z=1, N->z=-1.
  C knum = std::pow(C(bw * fs2, 0.0), order);
  double gain = (knum / denom).real();

  std::vector<Biquad> sos;
  for (const auto& [p1, p2] : pair_poles(std::move(zpoles))) {
    Biquad s;
    s.a1 = -(p1 + p2).real();
    s.a2 = (p1 * p2).real();
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;  // one zero at z=1, one at z=-1 per section
    sos.push_back(s);
  }
  sos.front().b0 *= gain;
  sos.front().b1 *= gain;
  sos.front().b2 *= gain;
  check_stable(sos);
  return sos;
}

std::vector<Biquad> butter_lowpass(int order, double fc_hz, double fs) {
  if (!(fc_hz > 0) || !(fc_hz < fs / 2)) throw ConfigError("lowpass: need 0 < fc < fs/2");
  const double fs2 = 2.0 * fs;
  const double wc = fs2 * std::tan(M_PI * fc_hz / fs);

  std::vector<C> zpoles;
  C denom(1.0, 0.0);
  for (const C& p : butter_prototype(order)) {
    C s = p * wc;
    zpoles.push_back((fs2 + s) / (fs2 - s));
    denom *= (fs2 - s);
  }
  double gain = (std::pow(C(wc, 0.0), order) / denom).real();

  std::vector<Biquad> sos;
  for (const auto& [p1, p2] : pair_poles(std::move(zpoles))) {
    Biquad s;
    s.a1 = -(p1 + p2).real();
    s.a2 = (p1 * p2).real();
    s.b0 = 1.0;
    s.b1 = 2.0;
    s.b2 = 1.0;  // both zeros at z=-1
    sos.push_back(s);
  }
  sos.front().b0 *= gain;
  sos.front().b1 *= gain;
  sos.front().b2 *= gain;
  // Pin DC gain to exactly unity (cancels accumulated rounding).
  double dc = 1.0;
  for (const Biquad& s : sos) dc *= (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  sos.front().b0 /= dc;
  sos.front().b1 /= dc;
  sos.front().b2 /= dc;
  check_stable(sos);
  return sos;
}

Biquad design_notch(double f0_hz, double q, double fs) {
  if (!(f0_hz > 0) || !(f0_hz < fs / 2)) throw ConfigError("notch: need 0 < f0 < fs/2");
  if (!(q > 0)) throw ConfigError("notch: need q > 0");
  double w0 = 2.0 * M_PI * f0_hz / fs;
  double alpha = std::sin(w0) / (2.0 * q);
  double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = 1.0 / a0;
  s.b1 = -2.0 * std::cos(w0) / a0;
  s.b2 = 1.0 / a0;
  s.a1 = -2.0 * std::cos(w0) / a0;
  s.a2 = (1.0 - alpha) / a0;
  check_stable({s});
  return s;
}

double sos_gain_at(const std::vector<Biquad>& sos, double f_hz, double fs) {
  double w = 2.0 * M_PI * f_hz / fs;
  C z = std::polar(1.0, w);
  C zi = 1.0 / z;
  C h(1.0, 0.0);
  for (const Biquad& s : sos) {
    h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
  }
  return std::abs(h);
}

namespace {

// One pass through the cascade, direct form II transposed, with initial
// state set to the step steady state scaled by the first sample.
void sosfilt_steady(const std::vector<Biquad>& sos, std::vector<double>* x) {
  double amp = x->empty() ? 0.0 : (*x)[0];
  for (const Biquad& s : sos) {
    double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    double z1 = (dc - s.b0) * amp;
    double z2 = (s.b2 - s.a2 * dc) * amp;
    for (double& v : *x) {
      double y = s.b0 * v + z1;
      z1 = s.b1 * v - s.a1 * y + z2;
      z2 = s.b2 * v - s.a2 * y;
      v = y;
    }
    amp *= dc;  // steady input amplitude seen by the next section
  }
}

}  // namespace

namespace {

// One forward-then-backward application with odd-reflection padding.
std::vector<double> filtfilt_once(const std::vector<Biquad>& sos,
                                  const std::vector<double>& x) {
  const int64_t n = static_cast<int64_t>(x.size());
  const int64_t padlen =
      std::min<int64_t>(n - 1, 250 * (static_cast<int64_t>(sos.size()) + 1));
  std::vector<double> ext;
  ext.reserve(static_cast<size_t>(n + 2 * padlen));
  for (int64_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x[0] - x[static_cast<size_t>(i)]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (int64_t i = 1; i <= padlen; ++i)
    ext.push_back(2.0 * x[static_cast<size_t>(n - 1)] - x[static_cast<size_t>(n - 1 - i)]);

  sosfilt_steady(sos, &ext);
  std::reverse(ext.begin(), ext.end());
  sosfilt_steady(sos, &ext);
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + padlen, ext.begin() + padlen + n);
}

}  // namespace

std::vector<double> sosfiltfilt(const std::vector<Biquad>& sos,
                                const std::vector<double>& x) {
  const int64_t n = static_cast<int64_t>(x.size());
  if (n == 0) return {};
  if (n == 1) {
    // Single sample: steady-state response only.
    double g = 1.0;
    for (const Biquad& s : sos) g *= (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    return {x[0] * g * g};
  }
  // Average the two processing directions. Both share the zero-phase
  // steady-state response; residual edge transients are direction-dependent,
  // and the average makes time-reversal symmetry exact by construction.
  std::vector<double> fwd = filtfilt_once(sos, x);
  std::vector<double> rev_in(x.rbegin(), x.rend());
  std::vector<double> rev = filtfilt_once(sos, rev_in);
  for (int64_t i = 0; i < n; ++i) {
    fwd[static_cast<size_t>(i)] =
        0.5 * (fwd[static_cast<size_t>(i)] + rev[static_cast<size_t>(n - 1 - i)]);
  }
  return fwd;
}

std::vector<double> bandpass(const std::vector<double>& x, double fs, double lo_hz,
                             double hi_hz, int order) {
  return sosfiltfilt(butter_bandpass(order, lo_hz, hi_hz, fs), x);
}

std::vector<double> notch(const std::vector<double>& x, double fs, double f0_hz,
                          double q) {
  return sosfiltfilt({design_notch(f0_hz, q, fs)}, x);
}

std::vector<double> envelope(const std::vector<double>& x, double fs, double smooth_hz) {
  if (!(smooth_hz > 0) || !(smooth_hz < fs / 2)) {
    throw ConfigError("envelope: need 0 < smooth_hz < fs/2");
  }
  std::vector<double> rect(x.size());
  for (size_t i = 0; i < x.size(); ++i) rect[i] = std::abs(x[i]);
  std::vector<double> y = sosfiltfilt(butter_lowpass(2, smooth_hz, fs), rect);
  for (double& v : y) v = std::max(v, 0.0);
  return y;
}

}  // namespace eegsep::dsp
