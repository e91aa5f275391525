// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "metrics/stoi.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstring>
#include <utility>
#include <vector>

#include "common/error.h"
#include "dsp/fft.h"
#include "dsp/resample.h"

namespace eegsep::metrics {
namespace {

constexpr double kTargetFs = 10000.0;
constexpr int64_t kFrameLen = 256;
constexpr int64_t kHop = 128;
constexpr int64_t kFftLen = 512;
constexpr int64_t kBands = 15;
constexpr double kFirstCenterHz = 150.0;
constexpr int64_t kSegment = 30;         // frames per correlation segment
constexpr double kSilenceRangeDb = 40.0; // keep frames within this of the max
constexpr double kClipBetaDb = -15.0;    // stoi clipping bound

// Symmetric Hann window (zero endpoints), length n.
std::vector<double> sym_hann(int64_t n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    w[static_cast<size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                             static_cast<double>(n - 1));
  }
  return w;
}

// Split into 50%-overlap windowed frames.
std::vector<std::vector<double>> frame_signal(const std::vector<double>& x,
                                              const std::vector<double>& win) {
  std::vector<std::vector<double>> frames;
  if (static_cast<int64_t>(x.size()) < kFrameLen) return frames;
  const int64_t count = 1 + (static_cast<int64_t>(x.size()) - kFrameLen) / kHop;
  frames.reserve(static_cast<size_t>(count));
  for (int64_t f = 0; f < count; ++f) {
    std::vector<double> fr(static_cast<size_t>(kFrameLen));
    for (int64_t i = 0; i < kFrameLen; ++i) {
      fr[static_cast<size_t>(i)] =
          x[static_cast<size_t>(f * kHop + i)] * win[static_cast<size_t>(i)];
    }
    frames.push_back(std::move(fr));
  }
  return frames;
}

// Overlap-add a list of frames back into a signal at 50% hop.
std::vector<double> overlap_add(const std::vector<std::vector<double>>& frames) {
  if (frames.empty()) return {};
  const int64_t n =
      kFrameLen + kHop * (static_cast<int64_t>(frames.size()) - 1);
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  for (size_t f = 0; f < frames.size(); ++f) {
    for (int64_t i = 0; i < kFrameLen; ++i) {
      x[f * static_cast<size_t>(kHop) + static_cast<size_t>(i)] +=
          frames[f][static_cast<size_t>(i)];
    }
  }
  return x;
}

// Third-octave band magnitudes: result (frames x kBands).
std::vector<std::vector<double>> band_magnitudes(
    const std::vector<double>& x, const std::vector<double>& win,
    dsp::FftR2C& fft) {
  // Band edges: center 150 * 2^(b/3), half-octave-of-a-third either side.
  static const auto edges = [] {
    std::array<std::pair<double, double>, kBands> e{};
    for (int64_t b = 0; b < kBands; ++b) {
      const double cf =
          kFirstCenterHz * std::pow(2.0, static_cast<double>(b) / 3.0);
      e[static_cast<size_t>(b)] = {cf / std::pow(2.0, 1.0 / 6.0),
                                   cf * std::pow(2.0, 1.0 / 6.0)};
    }
    return e;
  }();
  std::vector<std::vector<double>> frames = frame_signal(x, win);
  std::vector<std::vector<double>> out(frames.size(),
                                       std::vector<double>(kBands, 0.0));
  std::vector<double> padded(static_cast<size_t>(kFftLen), 0.0);
  std::vector<std::complex<double>> spec(
      static_cast<size_t>(fft.bins()));
  for (size_t f = 0; f < frames.size(); ++f) {
    std::memset(padded.data(), 0, padded.size() * sizeof(double));
    std::memcpy(padded.data(), frames[f].data(),
                static_cast<size_t>(kFrameLen) * sizeof(double));
    fft.run(padded.data(), spec.data());
    for (int64_t k = 0; k < fft.bins(); ++k) {
      const double hz =
          static_cast<double>(k) * kTargetFs / static_cast<double>(kFftLen);
      const double e = std::norm(spec[static_cast<size_t>(k)]);
      for (int64_t b = 0; b < kBands; ++b) {
        if (hz >= edges[static_cast<size_t>(b)].first &&
            hz < edges[static_cast<size_t>(b)].second) {
          out[f][static_cast<size_t>(b)] += e;
          break;
        }
      }
    }
    for (int64_t b = 0; b < kBands; ++b) {
      out[f][static_cast<size_t>(b)] =
          std::sqrt(out[f][static_cast<size_t>(b)]);
    }
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Pearson correlation; 0 when either side is degenerate.
double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double num = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    num += da * db;
    na += da * da;
    nb += db * db;
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return num / std::sqrt(na * nb);
}

}  // namespace

StoiScores stoi_estoi(const std::vector<double>& est,
                      const std::vector<double>& ref, double fs) {
  if (est.size() != ref.size()) {
    throw DimError("stoi: length mismatch " + std::to_string(est.size()) +
                   " vs " + std::to_string(ref.size()));
  }
  if (fs <= 0) throw ConfigError("stoi: sample rate must be positive");
  std::vector<double> y = est, x = ref;
  if (fs != kTargetFs) {
    y = dsp::resample(y, fs, kTargetFs);
    x = dsp::resample(x, fs, kTargetFs);
  }
  const std::vector<double> win = sym_hann(kFrameLen);

  // Drop frames more than 40 dB below the loudest clean frame; rebuild both
  // signals from the retained frames so the metrics see aligned audio.
  std::vector<std::vector<double>> xf = frame_signal(x, win);
  std::vector<std::vector<double>> yf = frame_signal(y, win);
  if (xf.empty()) {
    throw LengthError("stoi: signal shorter than one analysis frame");
  }
  std::vector<double> energy_db(xf.size());
  double max_db = -1e300;
  for (size_t f = 0; f < xf.size(); ++f) {
    double e = 0;
    for (double v : xf[f]) e += v * v;
    energy_db[f] = 10.0 * std::log10(e + 1e-300);
    max_db = std::max(max_db, energy_db[f]);
  }
  std::vector<std::vector<double>> xk, yk;
  for (size_t f = 0; f < xf.size(); ++f) {
    if (energy_db[f] > max_db - kSilenceRangeDb) {
      xk.push_back(std::move(xf[f]));
      yk.push_back(std::move(yf[f]));
    }
  }
  std::vector<double> xs = overlap_add(xk);
  std::vector<double> ys = overlap_add(yk);

  dsp::FftR2C fft(kFftLen);
  std::vector<std::vector<double>> xb = band_magnitudes(xs, win, fft);
  std::vector<std::vector<double>> yb = band_magnitudes(ys, win, fft);
  const int64_t frames = static_cast<int64_t>(xb.size());
  if (frames < kSegment) {
    throw LengthError("stoi: fewer than " + std::to_string(kSegment) +
                      " active frames (" + std::to_string(frames) + ")");
  }

  const double clip_factor = 1.0 + std::pow(10.0, -kClipBetaDb / 20.0);
  double stoi_sum = 0.0;
  int64_t stoi_count = 0;
  double estoi_sum = 0.0;
  int64_t estoi_count = 0;
  std::vector<double> xe(kSegment), ye(kSegment), yn(kSegment);
  for (int64_t m = kSegment; m <= frames; ++m) {
    // --- stoi: per-band temporal correlation with clipping.
    for (int64_t b = 0; b < kBands; ++b) {
      double ex = 0, ey = 0;
      for (int64_t i = 0; i < kSegment; ++i) {
        xe[static_cast<size_t>(i)] =
            xb[static_cast<size_t>(m - kSegment + i)][static_cast<size_t>(b)];
        ye[static_cast<size_t>(i)] =
            yb[static_cast<size_t>(m - kSegment + i)][static_cast<size_t>(b)];
        ex += xe[static_cast<size_t>(i)] * xe[static_cast<size_t>(i)];
        ey += ye[static_cast<size_t>(i)] * ye[static_cast<size_t>(i)];
      }
      const double scale = ey > 0.0 ? std::sqrt(ex / ey) : 0.0;
      for (int64_t i = 0; i < kSegment; ++i) {
        yn[static_cast<size_t>(i)] =
            std::min(ye[static_cast<size_t>(i)] * scale,
                     clip_factor * xe[static_cast<size_t>(i)]);
      }
      stoi_sum += correlation(xe, yn);
      ++stoi_count;
    }

    // --- estoi: row- then column-normalized segment correlation.
    // Rows are band envelopes over the segment, columns are spectra.
    double seg_x[kBands][kSegment];
    double seg_y[kBands][kSegment];
    for (int64_t b = 0; b < kBands; ++b) {
      for (int64_t i = 0; i < kSegment; ++i) {
        seg_x[b][i] =
            xb[static_cast<size_t>(m - kSegment + i)][static_cast<size_t>(b)];
        seg_y[b][i] =
            yb[static_cast<size_t>(m - kSegment + i)][static_cast<size_t>(b)];
      }
    }
    auto normalize_rows = [](double (&seg)[kBands][kSegment]) {
      for (int64_t b = 0; b < kBands; ++b) {
        double mu = 0;
        for (int64_t i = 0; i < kSegment; ++i) mu += seg[b][i];
        mu /= kSegment;
        double nrm = 0;
        for (int64_t i = 0; i < kSegment; ++i) {
          seg[b][i] -= mu;
          nrm += seg[b][i] * seg[b][i];
        }
        nrm = std::sqrt(nrm);
        if (nrm > 0.0) {
          for (int64_t i = 0; i < kSegment; ++i) seg[b][i] /= nrm;
        }
      }
    };
    auto normalize_cols = [](double (&seg)[kBands][kSegment]) {
      for (int64_t i = 0; i < kSegment; ++i) {
        double mu = 0;
        for (int64_t b = 0; b < kBands; ++b) mu += seg[b][i];
        mu /= kBands;
        double nrm = 0;
        for (int64_t b = 0; b < kBands; ++b) {
          seg[b][i] -= mu;
          nrm += seg[b][i] * seg[b][i];
        }
        nrm = std::sqrt(nrm);
        if (nrm > 0.0) {
          for (int64_t b = 0; b < kBands; ++b) seg[b][i] /= nrm;
        }
      }
    };
    normalize_rows(seg_x);
    normalize_cols(seg_x);
    normalize_rows(seg_y);
    normalize_cols(seg_y);
    double d = 0;
    for (int64_t i = 0; i < kSegment; ++i) {
      for (int64_t b = 0; b < kBands; ++b) d += seg_x[b][i] * seg_y[b][i];
    }
    estoi_sum += d / static_cast<double>(kSegment);
    ++estoi_count;
  }

  StoiScores s;
  s.stoi = stoi_sum / static_cast<double>(stoi_count);
  s.estoi = estoi_sum / static_cast<double>(estoi_count);
  return s;
}

}  // namespace eegsep::metrics
