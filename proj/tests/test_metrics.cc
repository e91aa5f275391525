// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "common/rng.h"
#include "doctest.h"
#include "dsp/resample.h"
#include "metrics/si_sdr.h"
#include "metrics/stoi.h"
#include "nn/grad_check.h"
#include "nn/registry.h"

namespace {

using eegsep::Rng;
using eegsep::metrics::estoi;
using eegsep::metrics::si_sdr_db;
using eegsep::metrics::si_sdr_loss;
using eegsep::metrics::stoi;
using eegsep::metrics::stoi_estoi;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> random_signal(int64_t n, Rng& rng, double amp = 1.0) {
  std::vector<double> x(static_cast<size_t>(n));
  for (double& v : x) v = amp * rng.uniform(-1.0, 1.0);
  return x;
}

// Intelligibility fixture: harmonic stack under a syllabic-rate envelope with
// envelope-gated noise, so every third-octave band carries signal.
std::vector<double> voice_fixture(uint64_t seed, int64_t n, double fs) {
  Rng rng(seed);
  double f0 = rng.uniform(110.0, 180.0);
  double env_hz = rng.uniform(3.0, 5.0);
  double env_phase = rng.uniform(0.0, kTwoPi);
  int64_t harmonics = static_cast<int64_t>(0.45 * fs / f0);
  std::vector<double> phase(static_cast<size_t>(harmonics));
  for (double& p : phase) p = rng.uniform(0.0, kTwoPi);
  std::vector<double> x(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / fs;
    double u = 0.5 + 0.5 * std::sin(kTwoPi * env_hz * t + env_phase);
    double e = 0.1 + 0.9 * u * u;
    double s = 0.0;
    for (int64_t h = 1; h <= harmonics; ++h) {
      s += std::sin(kTwoPi * static_cast<double>(h) * f0 * t + phase[h - 1]) /
           static_cast<double>(h);
    }
    x[i] = 0.1 * e * (s + 0.4 * rng.normal());
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scale-invariant SDR: closed forms, invariances, and the training loss.

TEST_CASE("si_sdr: hand-computed values and the +60 dB cap") {
  // est [1,0] vs ref [1,1]: projection is [0.5, 0.5], residual [-0.5, 0.5],
  // equal energies, so exactly 0 dB.
  CHECK(si_sdr_db({1.0, 0.0}, {1.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(11);
  std::vector<double> s = random_signal(128, rng);
  CHECK(si_sdr_db(s, s) == 60.0);  // zero residual hits the cap

  std::vector<double> twice = s;
  for (double& v : twice) v *= 2.0;
  CHECK(si_sdr_db(twice, s) == 60.0);  // rescaling is projected out
}

TEST_CASE("si_sdr: invariant under estimate rescaling") {
  Rng rng(12);
  std::vector<double> ref = random_signal(300, rng);
  std::vector<double> est = random_signal(300, rng);
  double base = si_sdr_db(est, ref);
  for (double scale : {0.1, 10.0, -3.0}) {
    std::vector<double> scaled = est;
    for (double& v : scaled) v *= scale;
    CHECK(std::fabs(si_sdr_db(scaled, ref) - base) < 1e-6);
  }
}

TEST_CASE("si_sdr: precondition errors") {
  CHECK_THROWS_AS(si_sdr_db(std::vector<double>{}, std::vector<double>{}),
                  eegsep::LengthError);
  CHECK_THROWS_AS(si_sdr_db({1.0, 2.0}, {0.0, 0.0}), eegsep::ValueError);
  CHECK_THROWS_AS(si_sdr_db({1.0, 2.0}, {1.0}), eegsep::DimError);
}

TEST_CASE("si_sdr: monotone along the noise-to-target line") {
  Rng rng(13);
  std::vector<double> s = random_signal(400, rng);
  std::vector<double> noise = random_signal(400, rng);
  double es = 0.0, cross = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    es += s[i] * s[i];
    cross += noise[i] * s[i];
  }
  for (size_t i = 0; i < noise.size(); ++i) noise[i] -= cross / es * s[i];
  double en = 0.0;
  for (double v : noise) en += v * v;

  // est(t) = (1-t) noise + t s with noise orthogonal to s. The projection is
  // t s and the residual (1-t) noise, giving the closed form below.
  double prev = -1e9;
  for (int k = 0; k <= 10; ++k) {
    double t = 0.05 + 0.9 * static_cast<double>(k) / 10.0;
    std::vector<double> est(s.size());
    for (size_t i = 0; i < s.size(); ++i) est[i] = (1.0 - t) * noise[i] + t * s[i];
    double got = si_sdr_db(est, s);
    double want = 10.0 * std::log10(t * t * es / ((1.0 - t) * (1.0 - t) * en));
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
    CHECK(got > prev);
    prev = got;
  }
}

TEST_CASE("si_sdr: loss agrees with the metric and passes gradcheck") {
  using eegsep::nn::GradCheckReport;
  using eegsep::nn::ParamRegistry;
  using eegsep::nn::Tensor;
  using eegsep::nn::Var;
  using eegsep::nn::Workspace;

  Rng rng(14);
  Tensor<double> ref({40}, random_signal(40, rng));
  Tensor<double> est({40}, random_signal(40, rng));

  {
    ParamRegistry<double> reg(7);
    Workspace<double> ws(&reg);
    Var<double> loss = si_sdr_loss(ws.input(est), ref);
    std::vector<double> ev(est.data(), est.data() + est.size());
    std::vector<double> rv(ref.data(), ref.data() + ref.size());
    CHECK(loss.value()[0] == doctest::Approx(-si_sdr_db(ev, rv)).epsilon(1e-9));
  }

  ParamRegistry<double> reg(7);
  GradCheckReport rep = eegsep::nn::grad_check(
      reg,
      [&]() {
        Workspace<double> ws(&reg);
        Var<double> e = ws.param_uniform("probe.est", {40}, 1);
        return si_sdr_loss(e, ref).value()[0];
      },
      [&]() {
        Workspace<double> ws(&reg);
        Var<double> e = ws.param_uniform("probe.est", {40}, 1);
        ws.backward(si_sdr_loss(e, ref));
      });
  CHECK(rep.max_rel_err < 1e-6);

  CHECK_THROWS_AS(
      [&]() {
        ParamRegistry<double> r2(7);
        Workspace<double> ws(&r2);
        si_sdr_loss(ws.input(est), Tensor<double>({40}));
      }(),
      eegsep::ValueError);
}

// ---------------------------------------------------------------------------
// STOI / ESTOI.

TEST_CASE("stoi: self-comparison scores one") {
  std::vector<double> s = voice_fixture(21, 30000, 10000.0);
  auto scores = stoi_estoi(s, s, 10000.0);
  CHECK(scores.stoi >= 0.999);
  CHECK(scores.stoi <= 1.0 + 1e-12);
  CHECK(scores.estoi >= 0.999);
  CHECK(scores.estoi <= 1.0 + 1e-12);
}

TEST_CASE("stoi: unrelated noise scores low") {
  for (uint64_t seed : {1u, 2u, 3u}) {
    std::vector<double> s = voice_fixture(30 + seed, 30000, 10000.0);
    Rng rng(100 + seed);
    std::vector<double> noise = random_signal(30000, rng, 0.1);
    auto scores = stoi_estoi(noise, s, 10000.0);
    CHECK(std::fabs(scores.stoi) < 0.3);
    CHECK(std::fabs(scores.estoi) < 0.3);
  }
}

TEST_CASE("stoi: more noise scores lower") {
  std::vector<double> s = voice_fixture(40, 30000, 10000.0);
  Rng rng(41);
  std::vector<double> noise = random_signal(30000, rng, 1.0);
  double rms = 0.0;
  for (double v : s) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(s.size()));

  double last_stoi = 2.0, last_estoi = 2.0;
  for (double level : {0.1, 0.5, 2.0}) {
    std::vector<double> noisy = s;
    for (size_t i = 0; i < noisy.size(); ++i) noisy[i] += level * rms * noise[i];
    auto scores = stoi_estoi(noisy, s, 10000.0);
    CHECK(scores.stoi < last_stoi);
    CHECK(scores.estoi < last_estoi);
    last_stoi = scores.stoi;
    last_estoi = scores.estoi;
  }
  CHECK(last_stoi > -1.0);  // raw scores stay in [-1, 1]
  CHECK(last_stoi < 0.9);   // heavy noise clearly degrades
}

TEST_CASE("stoi: internal resampling matches explicit resampling") {
  std::vector<double> ref8 = voice_fixture(50, 24000, 8000.0);
  std::vector<double> est8 = ref8;
  Rng rng(51);
  for (size_t i = 0; i < est8.size(); ++i) est8[i] += 0.01 * rng.uniform(-1.0, 1.0);

  auto direct = stoi_estoi(est8, ref8, 8000.0);
  auto resampled = stoi_estoi(eegsep::dsp::resample(est8, 8000.0, 10000.0),
                              eegsep::dsp::resample(ref8, 8000.0, 10000.0), 10000.0);
  CHECK(std::fabs(direct.stoi - resampled.stoi) < 1e-10);
  CHECK(std::fabs(direct.estoi - resampled.estoi) < 1e-10);
}

TEST_CASE("stoi: precondition and degenerate inputs") {
  std::vector<double> s = voice_fixture(60, 2000, 10000.0);  // 0.2 s: too short
  CHECK_THROWS_AS(stoi_estoi(s, s, 10000.0), eegsep::LengthError);

  std::vector<double> a(30000, 0.0), b = voice_fixture(61, 30000, 10000.0);
  CHECK_THROWS_AS(stoi_estoi(a, b, 0.0), eegsep::ConfigError);
  CHECK_THROWS_AS(stoi_estoi(std::vector<double>(10, 0.1), b, 10000.0),
                  eegsep::DimError);

  // All-zero clean reference: every correlation is degenerate, and the
  // degenerate guards turn the score into 0 rather than dividing by zero.
  auto degen = stoi_estoi(b, a, 10000.0);
  CHECK(degen.stoi == 0.0);
  CHECK(degen.estoi == 0.0);
}
