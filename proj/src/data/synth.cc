// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "data/synth.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "common/error.h"
#include "common/rng.h"
#include "common/text.h"
#include "data/wav.h"
#include "dsp/resample.h"

namespace eegsep::data {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Smooth positive amplitude envelope: a syllabic-rate oscillation shaped by a
// slower phrasal one. Analytic in t so the audio-rate and EEG-rate paths see
// the same function.
struct EnvelopeParams {
  double syl_hz, syl_phase, phrase_hz, phrase_phase;

  double eval(double t) const {
    double u = 0.5 + 0.5 * std::sin(kTwoPi * syl_hz * t + syl_phase);
    double p = 0.55 + 0.45 * std::sin(kTwoPi * phrase_hz * t + phrase_phase);
    return (0.06 + 0.94 * u * u) * p;
  }
};

// Amplitude-modulated harmonic stack with slow vibrato and a little
// envelope-gated breath noise so every third-octave band carries signal.
std::vector<double> pseudo_speech(Rng& rng, int64_t n, double fs,
                                  std::vector<double>* envelope_out) {
  EnvelopeParams env;
  env.syl_hz = rng.uniform(2.5, 5.5);
  env.syl_phase = rng.uniform(0.0, kTwoPi);
  env.phrase_hz = rng.uniform(0.35, 0.9);
  env.phrase_phase = rng.uniform(0.0, kTwoPi);

  double f0 = rng.uniform(95.0, 210.0);
  double vib_hz = rng.uniform(3.0, 6.0);
  double vib_phase = rng.uniform(0.0, kTwoPi);
  double vib_depth = rng.uniform(0.1, 0.3);  // radians at the fundamental

  int64_t harmonics = static_cast<int64_t>(0.45 * fs / f0);
  if (harmonics < 1) harmonics = 1;
  std::vector<double> amp(static_cast<size_t>(harmonics));
  std::vector<double> phase(static_cast<size_t>(harmonics));
  for (int64_t h = 0; h < harmonics; ++h) {
    amp[h] = rng.uniform(0.7, 1.3) / std::pow(static_cast<double>(h + 1), 0.9);
    phase[h] = rng.uniform(0.0, kTwoPi);
  }

  std::vector<double> x(static_cast<size_t>(n));
  if (envelope_out) envelope_out->resize(static_cast<size_t>(n));
  double sumsq = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / fs;
    double e = env.eval(t);
    if (envelope_out) (*envelope_out)[i] = e;
    double warp = vib_depth * std::sin(kTwoPi * vib_hz * t + vib_phase);
    double s = 0.0;
    for (int64_t h = 0; h < harmonics; ++h) {
      double hh = static_cast<double>(h + 1);
      s += amp[h] * std::sin(kTwoPi * hh * f0 * t + hh * warp + phase[h]);
    }
    double v = e * (s + 0.4 * rng.normal());
    x[i] = v;
    sumsq += v * v;
  }
  double rms = std::sqrt(sumsq / static_cast<double>(n));
  double gain = rms > 0 ? 0.06 / rms : 0.0;
  for (double& v : x) v *= gain;
  return x;
}

double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

}  // namespace

void SceneConfig::validate() const {
  if (!(fs_audio > 0) || !(fs_eeg > 0)) {
    throw ConfigError("scene sampling rates must be positive");
  }
  if (!(duration_s >= 1.0)) {
    throw ConfigError(strprintf("scene duration must be >= 1 s, got %g", duration_s));
  }
  if (eeg_channels < 2) {
    throw ConfigError(strprintf("scene needs >= 2 EEG channels, got %lld",
                                static_cast<long long>(eeg_channels)));
  }
  if (!std::isfinite(sir_db) || !std::isfinite(eeg_snr_db)) {
    throw ConfigError("sir_db and eeg_snr_db must be finite");
  }
}

Scene synth_scene(uint64_t seed, const SceneConfig& cfg) {
  cfg.validate();
  Rng root(seed);
  Rng rng_target = root.fork(1);
  Rng rng_interf = root.fork(2);
  Rng rng_eeg = root.fork(3);

  Scene scene;
  scene.seed = seed;
  scene.fs_audio = cfg.fs_audio;
  scene.attended_ear = (seed % 2 == 0) ? Ear::kLeft : Ear::kRight;

  int64_t n = static_cast<int64_t>(std::llround(cfg.duration_s * cfg.fs_audio));
  std::vector<double> env_audio;
  scene.target = pseudo_speech(rng_target, n, cfg.fs_audio, &env_audio);
  scene.interferer = pseudo_speech(rng_interf, n, cfg.fs_audio, nullptr);

  // Scale the interferer so the target-to-interferer energy ratio is exact,
  // then mix by sample-wise addition to keep additivity bitwise.
  double et = energy(scene.target);
  double ei = energy(scene.interferer);
  if (ei > 0) {
    double g = std::sqrt(et / (ei * std::pow(10.0, cfg.sir_db / 10.0)));
    for (double& v : scene.interferer) v *= g;
  }
  scene.mixture.resize(scene.target.size());
  for (size_t i = 0; i < scene.mixture.size(); ++i) {
    scene.mixture[i] = scene.target[i] + scene.interferer[i];
  }

  // Surrogate EEG: each channel is gain * (target envelope at fs_eeg, mean
  // removed) + a 10 Hz oscillation + white noise sized per eeg_snr_db.
  std::vector<double> env_eeg = dsp::resample(env_audio, cfg.fs_audio, cfg.fs_eeg);
  int64_t te = static_cast<int64_t>(env_eeg.size());
  double mean = 0.0;
  for (double v : env_eeg) mean += v;
  mean /= static_cast<double>(te);
  double var = 0.0;
  for (double& v : env_eeg) {
    v -= mean;
    var += v * v;
  }
  var /= static_cast<double>(te);
  double sd = std::sqrt(var);

  nn::Tensor<double> eeg({cfg.eeg_channels, te});
  double noise_scale = std::pow(10.0, -cfg.eeg_snr_db / 20.0);
  for (int64_t c = 0; c < cfg.eeg_channels; ++c) {
    double gain = rng_eeg.uniform(0.6, 1.4);
    double alpha_amp = 0.35 * gain * sd * std::numbers::sqrt2;
    double alpha_phase = rng_eeg.uniform(0.0, kTwoPi);
    double sigma = gain * sd * noise_scale;
    for (int64_t t = 0; t < te; ++t) {
      double tt = static_cast<double>(t) / cfg.fs_eeg;
      eeg.at(c, t) = gain * env_eeg[t] +
                     alpha_amp * std::sin(kTwoPi * 10.0 * tt + alpha_phase) +
                     sigma * rng_eeg.normal();
    }
  }
  std::vector<std::string> names(static_cast<size_t>(cfg.eeg_channels));
  for (int64_t c = 0; c < cfg.eeg_channels; ++c) {
    names[c] = strprintf("E%02lld", static_cast<long long>(c));
  }
  scene.eeg = EegRecording::from_tensor(eeg, cfg.fs_eeg, std::move(names));
  return scene;
}

void save_scene(const std::string& dir, const std::string& stem, const Scene& scene) {
  auto mono = [&](const std::vector<double>& x) {
    Wav w;
    w.sample_rate = scene.fs_audio;
    w.channels = {x};
    return w;
  };
  write_wav(dir + "/" + stem + ".mix.wav", mono(scene.mixture), WavEncoding::kFloat32);
  write_wav(dir + "/" + stem + ".target.wav", mono(scene.target), WavEncoding::kFloat32);
  write_wav(dir + "/" + stem + ".interf.wav", mono(scene.interferer),
            WavEncoding::kFloat32);
  write_eeg(dir + "/" + stem + ".eeg", scene.eeg);

  std::string meta;
  meta += strprintf("seed %llu\n", static_cast<unsigned long long>(scene.seed));
  meta += std::string("attended_ear ") +
          (scene.attended_ear == Ear::kLeft ? "left" : "right") + "\n";
  std::FILE* f = std::fopen((dir + "/" + stem + ".meta").c_str(), "wb");
  if (!f) throw FormatError("cannot write scene metadata: " + dir + "/" + stem);
  std::fwrite(meta.data(), 1, meta.size(), f);
  std::fclose(f);
}

Scene load_scene(const std::string& dir, const std::string& stem) {
  auto mono = [&](const std::string& suffix) {
    Wav w = read_wav(dir + "/" + stem + suffix);
    if (w.channels.size() != 1) {
      throw FormatError("scene audio must be mono: " + stem + suffix);
    }
    return std::move(w.channels[0]);
  };
  Scene scene;
  Wav mix = read_wav(dir + "/" + stem + ".mix.wav");
  if (mix.channels.size() != 1) throw FormatError("scene audio must be mono: " + stem);
  scene.fs_audio = mix.sample_rate;
  scene.mixture = std::move(mix.channels[0]);
  scene.target = mono(".target.wav");
  scene.interferer = mono(".interf.wav");
  if (scene.target.size() != scene.mixture.size() ||
      scene.interferer.size() != scene.mixture.size()) {
    throw FormatError("scene streams have mismatched lengths: " + stem);
  }
  scene.eeg = read_eeg(dir + "/" + stem + ".eeg");

  std::FILE* f = std::fopen((dir + "/" + stem + ".meta").c_str(), "rb");
  if (!f) throw FormatError("missing scene metadata: " + dir + "/" + stem);
  std::string meta;
  char buf[256];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) meta.append(buf, got);
  std::fclose(f);
  for (const std::string& line : split_on(meta, '\n')) {
    std::vector<std::string> tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw FormatError("malformed scene metadata line: " + line);
    if (tok[0] == "seed") {
      scene.seed = std::strtoull(tok[1].c_str(), nullptr, 10);
    } else if (tok[0] == "attended_ear") {
      if (tok[1] == "left") {
        scene.attended_ear = Ear::kLeft;
      } else if (tok[1] == "right") {
        scene.attended_ear = Ear::kRight;
      } else {
        throw FormatError("attended_ear must be left or right, got " + tok[1]);
      }
    } else {
      throw FormatError("unknown scene metadata field: " + tok[0]);
    }
  }
  return scene;
}

}  // namespace eegsep::data
