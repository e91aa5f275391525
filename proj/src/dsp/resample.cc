// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dsp/resample.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace eegsep::dsp {

namespace {

constexpr int kSincZeros = 16;     // sinc zero crossings per side
constexpr double kRolloff = 0.97;  // cutoff margin below the tighter Nyquist

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  double px = M_PI * x;
  return std::sin(px) / px;
}

}  // namespace

std::vector<double> resample(const std::vector<double>& x, double fs, double target_fs) {
  if (!(fs > 0) || !(target_fs > 0)) throw ConfigError("resample: rates must be positive");
  if (x.empty()) return {};
  if (fs == target_fs) return x;

  const int64_t n = static_cast<int64_t>(x.size());
  const double ratio = target_fs / fs;
  const int64_t out_len = std::max<int64_t>(1, std::llround(static_cast<double>(n) * ratio));
  // Cutoff in cycles per input sample; kernel dilates when downsampling.
  const double fc = 0.5 * std::min(1.0, ratio) * kRolloff;
  const double half_width = static_cast<double>(kSincZeros) / (2.0 * fc);

  std::vector<double> out(static_cast<size_t>(out_len));
  for (int64_t j = 0; j < out_len; ++j) {
    const double t = static_cast<double>(j) / ratio;
    const int64_t k0 = std::max<int64_t>(0, static_cast<int64_t>(std::ceil(t - half_width)));
    const int64_t k1 = std::min<int64_t>(n - 1, static_cast<int64_t>(std::floor(t + half_width)));
    double acc = 0, wsum = 0;
    for (int64_t k = k0; k <= k1; ++k) {
      const double d = static_cast<double>(k) - t;
      const double u = d / half_width;  // in [-1, 1]
      const double w = 0.5 * (1.0 + std::cos(M_PI * u));
      const double h = w * sinc(2.0 * fc * d);
      acc += h * x[static_cast<size_t>(k)];
      wsum += h;
    }
    out[static_cast<size_t>(j)] = wsum != 0.0 ? acc / wsum : 0.0;
  }
  return out;
}

}  // namespace eegsep::dsp
