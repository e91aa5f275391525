// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Tests for the model stack: speech codec, EEG encoder, separator.

#include <cmath>
#include <vector>

#include "codec/codec.h"
#include "common/error.h"
#include "common/rng.h"
#include "doctest.h"
#include "dsp/bands.h"
#include "eeg/adjacency.h"
#include "eeg/encoder.h"
#include "eeg/features.h"
#include "nn/grad_check.h"
#include "nn/ops.h"
#include "nn/registry.h"
#include "sep/separator.h"

namespace {

using eegsep::Rng;
using eegsep::nn::GradCheckReport;
using eegsep::nn::ParamRegistry;
using eegsep::nn::Shape;
using eegsep::nn::Tensor;
using eegsep::nn::Var;
using eegsep::nn::Workspace;

template <typename T>
Tensor<T> random_tensor(const Shape& shape, Rng& rng, T lo = T(-1),
                        T hi = T(1)) {
  Tensor<T> t(shape);
  for (int64_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<T>(rng.uniform(double(lo), double(hi)));
  }
  return t;
}

// Scalar probe: sum of sin-weighted entries, to exercise every output.
template <typename T>
Var<T> weighted(Var<T> x) {
  Tensor<T> w(x.shape());
  for (int64_t i = 0; i < w.size(); ++i) {
    w[i] = static_cast<T>(std::sin(0.37 * double(i + 1)));
  }
  return eegsep::nn::dot_all(x, x.tape->constant(w, "probe_w"));
}

}  // namespace

TEST_CASE("codec: config validation") {
  eegsep::codec::CodecConfig cfg;
  cfg.kernel_len = 21;
  CHECK_THROWS_AS(cfg.validate(), eegsep::ConfigError);
  cfg.kernel_len = 0;
  CHECK_THROWS_AS(cfg.validate(), eegsep::ConfigError);
  cfg.kernel_len = 20;
  cfg.channels = 0;
  CHECK_THROWS_AS(cfg.validate(), eegsep::ConfigError);
  cfg.channels = 128;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.stride() == 10);
}

TEST_CASE("codec: frame arithmetic") {
  eegsep::codec::CodecConfig cfg;  // K=20, stride 10
  CHECK(eegsep::codec::encoded_frames(1020, cfg) == 101);
  CHECK(eegsep::codec::encode_padding(1020, cfg) == 0);
  CHECK(eegsep::codec::decoded_samples(101, cfg) == 1020);
  // Ragged length: padded up to the next frame boundary.
  CHECK(eegsep::codec::encoded_frames(1023, cfg) == 102);
  CHECK(eegsep::codec::encode_padding(1023, cfg) == 7);
  CHECK(eegsep::codec::decoded_samples(102, cfg) == 1030);
  // Exactly one window.
  CHECK(eegsep::codec::encoded_frames(20, cfg) == 1);
  CHECK(eegsep::codec::decoded_samples(1, cfg) == 20);
  CHECK_THROWS_AS(eegsep::codec::encoded_frames(19, cfg),
                  eegsep::LengthError);
}

TEST_CASE("codec: encode shape, nonnegativity, zero maps to zero") {
  eegsep::codec::CodecConfig cfg;  // K=20, C=128
  ParamRegistry<double> reg(11);
  Rng rng(42);

  {
    Workspace<double> ws(&reg);
    Var<double> x = ws.input(random_tensor<double>({1, 1, 1020}, rng));
    Var<double> emb = eegsep::codec::encode_speech(ws, x, cfg);
    CHECK(emb.shape() == Shape{1, 128, 101});
    double mn = 1e300;
    for (int64_t i = 0; i < emb.value().size(); ++i) {
      mn = std::min(mn, emb.value()[i]);
    }
    CHECK(mn >= 0.0);  // ReLU output.
    Var<double> dec = eegsep::codec::decode_speech(ws, emb, cfg);
    CHECK(dec.shape() == Shape{1, 1, 1020});
  }
  {
    // Bias-free encoder: silence encodes to an exactly zero embedding.
    Workspace<double> ws(&reg);
    Var<double> x = ws.input(Tensor<double>({2, 1, 40}));
    Var<double> emb = eegsep::codec::encode_speech(ws, x, cfg);
    for (int64_t i = 0; i < emb.value().size(); ++i) {
      CHECK(emb.value()[i] == 0.0);
    }
  }
  {
    // Wrong channel-axis width.
    Workspace<double> ws(&reg);
    Var<double> x = ws.input(Tensor<double>({1, 2, 100}));
    CHECK_THROWS_AS(eegsep::codec::encode_speech(ws, x, cfg),
                    eegsep::DimError);
  }
}

TEST_CASE("codec: decoder is linear") {
  eegsep::codec::CodecConfig cfg;
  cfg.channels = 8;
  cfg.kernel_len = 12;
  ParamRegistry<double> reg(3);
  Rng rng(7);
  Tensor<double> a = random_tensor<double>({2, 8, 9}, rng);
  Tensor<double> b = random_tensor<double>({2, 8, 9}, rng);
  const double alpha = 1.7, beta = -0.4;

  auto decode = [&](const Tensor<double>& e) {
    Workspace<double> ws(&reg);
    return eegsep::codec::decode_speech(ws, ws.input(e), cfg).value();
  };
  Tensor<double> da = decode(a);
  Tensor<double> db = decode(b);
  Tensor<double> mix(a.shape());
  for (int64_t i = 0; i < mix.size(); ++i) {
    mix[i] = alpha * a[i] + beta * b[i];
  }
  Tensor<double> dmix = decode(mix);
  CHECK(dmix.shape() == Shape{2, 1, (9 - 1) * 6 + 12});
  double num = 0, den = 0;
  for (int64_t i = 0; i < dmix.size(); ++i) {
    const double want = alpha * da[i] + beta * db[i];
    num += (dmix[i] - want) * (dmix[i] - want);
    den += want * want;
  }
  CHECK(std::sqrt(num / std::max(den, 1e-300)) < 1e-10);
}

TEST_CASE("grad: codec round trip") {
  eegsep::codec::CodecConfig cfg;
  cfg.channels = 4;
  cfg.kernel_len = 6;
  ParamRegistry<double> reg(19);
  Rng rng(5);
  Tensor<double> x = random_tensor<double>({2, 1, 23}, rng);  // ragged: pad 1

  GradCheckReport rep = eegsep::nn::grad_check(
      reg,
      [&]() {
        Workspace<double> ws(&reg);
        Var<double> emb = eegsep::codec::encode_speech(ws, ws.input(x), cfg);
        Var<double> dec = eegsep::codec::decode_speech(ws, emb, cfg);
        return weighted(dec).value()[0];
      },
      [&]() {
        Workspace<double> ws(&reg);
        Var<double> emb = eegsep::codec::encode_speech(ws, ws.input(x), cfg);
        Var<double> dec = eegsep::codec::decode_speech(ws, emb, cfg);
        ws.backward(weighted(dec));
      });
  CHECK(rep.max_rel_err < 1e-6);
}

// ---------------------------------------------------------------------------
// Electrode graph construction.

TEST_CASE("adjacency: default graph and closed-form normalizations") {
  using eegsep::eeg::default_adjacency;
  using eegsep::eeg::normalized_adjacency;

  Tensor<double> a = default_adjacency(4);
  for (int64_t i = 0; i < 4; ++i) {
    for (int64_t j = 0; j < 4; ++j) {
      CHECK(a.at(i, j) == (i == j ? 1.25 : 0.25));
    }
  }

  // Identity normalizes to itself bitwise.
  Tensor<double> eye({3, 3});
  for (int64_t i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  Tensor<double> neye = normalized_adjacency(eye);
  for (int64_t i = 0; i < 9; ++i) CHECK(neye[i] == eye[i]);

  // All-ones (C=4): D = 4I, normalized = ones/4, doubly stochastic.
  Tensor<double> ones({4, 4});
  ones.fill(1.0);
  Tensor<double> nones = normalized_adjacency(ones);
  for (int64_t i = 0; i < 16; ++i) CHECK(nones[i] == doctest::Approx(0.25).epsilon(1e-15));

  // Zero-degree node gets a self-loop instead of dividing by zero.
  Tensor<double> iso({3, 3});
  iso.at(0, 0) = 1.0;
  iso.at(0, 1) = 1.0;
  iso.at(1, 0) = 1.0;
  iso.at(1, 1) = 1.0;
  Tensor<double> niso = normalized_adjacency(iso);
  CHECK(niso.at(2, 2) == 1.0);
  CHECK(niso.at(2, 0) == 0.0);
  CHECK(std::abs(niso.at(0, 1) - 0.5) < 1e-15);
}

TEST_CASE("adjacency: validation errors") {
  using eegsep::eeg::normalized_adjacency;
  Tensor<double> bad({2, 3});
  CHECK_THROWS_AS(normalized_adjacency(bad), eegsep::DimError);

  Tensor<double> asym({2, 2});
  asym.at(0, 1) = 0.5;
  asym.at(1, 0) = 0.25;
  asym.at(0, 0) = asym.at(1, 1) = 1.0;
  CHECK_THROWS_AS(normalized_adjacency(asym), eegsep::ConfigError);

  Tensor<double> neg({2, 2});
  neg.at(0, 0) = neg.at(1, 1) = 1.0;
  neg.at(0, 1) = neg.at(1, 0) = -0.1;
  CHECK_THROWS_AS(normalized_adjacency(neg), eegsep::ConfigError);
}

TEST_CASE("adjacency: montage parsing and Gaussian graph") {
  using eegsep::eeg::Electrode;
  using eegsep::eeg::montage_adjacency;
  using eegsep::eeg::parse_montage;

  std::vector<Electrode> mont = parse_montage(
      "# comment line\n"
      "Fz 0.0 1.0 0.0\n"
      "\n"
      "Cz 0.0 0.0 1.0\n"
      "Pz 0.0 -1.0 0.5\n");
  REQUIRE(mont.size() == 3);
  CHECK(mont[0].name == "Fz");
  CHECK(mont[2].y == -1.0);
  CHECK_THROWS_AS(parse_montage("Fz 0.0 1.0\n"), eegsep::FormatError);
  CHECK_THROWS_AS(parse_montage("Fz a b c\n"), eegsep::FormatError);

  // Two electrodes at distance d: sigma = d, weight = exp(-1/2).
  std::vector<Electrode> pair = {{"a", 0, 0, 0}, {"b", 3.0, 0, 0}};
  Tensor<double> ap = montage_adjacency(pair);
  CHECK(ap.at(0, 0) == 1.0);
  CHECK(ap.at(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(ap.at(0, 1) == ap.at(1, 0));

  std::vector<Electrode> stacked = {{"a", 1, 1, 1}, {"b", 1, 1, 1}};
  CHECK_THROWS_AS(montage_adjacency(stacked), eegsep::ConfigError);
}

TEST_CASE("adjacency: normalized spectral radius <= 1") {
  using eegsep::eeg::default_adjacency;
  using eegsep::eeg::Electrode;
  using eegsep::eeg::montage_adjacency;
  using eegsep::eeg::normalized_adjacency;
  using eegsep::eeg::spectral_radius_sym;

  CHECK(spectral_radius_sym(normalized_adjacency(default_adjacency(7))) <=
        1.0 + 1e-9);

  std::vector<Electrode> mont;
  Rng mrng(100);
  for (int i = 0; i < 6; ++i) {
    mont.push_back({"e" + std::to_string(i), mrng.uniform(-1, 1),
                    mrng.uniform(-1, 1), mrng.uniform(-1, 1)});
  }
  CHECK(spectral_radius_sym(normalized_adjacency(montage_adjacency(mont))) <=
        1.0 + 1e-9);

  for (uint64_t seed = 1; seed <= 3; ++seed) {
    Rng rng(seed);
    Tensor<double> a({5, 5});
    for (int64_t i = 0; i < 5; ++i) {
      for (int64_t j = i; j < 5; ++j) {
        double w = rng.uniform(0.0, 1.0);
        a.at(i, j) = w;
        a.at(j, i) = w;
      }
    }
    CHECK(spectral_radius_sym(normalized_adjacency(a)) <= 1.0 + 1e-9);
  }
}

// ---------------------------------------------------------------------------
// Frequency-domain EEG features.

TEST_CASE("features: zero EEG hits the entropy floor") {
  Tensor<double> eeg({2, 256});
  Tensor<double> f = eegsep::eeg::frequency_features(eeg, 128.0);
  CHECK(f.shape() == Shape{2, 10});
  const double de_floor = eegsep::dsp::differential_entropy({0.0})[0];
  for (int64_t c = 0; c < 2; ++c) {
    for (int64_t b = 0; b < 5; ++b) {
      CHECK(f.at(c, b) == 0.0);
      CHECK(f.at(c, b + 5) == de_floor);
      CHECK(std::isfinite(f.at(c, b + 5)));
    }
  }
}

TEST_CASE("features: 10 Hz sine concentrates in the alpha band") {
  const double fs = 128.0;
  const int64_t n = 256;
  Tensor<double> eeg({1, n});
  for (int64_t i = 0; i < n; ++i) {
    eeg.at(0, i) = std::sin(2.0 * M_PI * 10.0 * double(i) / fs);
  }
  Tensor<double> f = eegsep::eeg::frequency_features(eeg, fs);
  int64_t argmax = 0;
  for (int64_t b = 1; b < 5; ++b) {
    if (f.at(0, b) > f.at(0, argmax)) argmax = b;
  }
  CHECK(argmax == 2);  // delta, theta, [alpha], beta, gamma
  CHECK(f.at(0, 2) > 0.9 * (f.at(0, 0) + f.at(0, 1) + f.at(0, 2) +
                            f.at(0, 3) + f.at(0, 4)));
}

TEST_CASE("features: invariant to time reversal") {
  const double fs = 128.0;
  const int64_t n = 250;  // deliberately not a multiple of anything
  Rng rng(7);
  Tensor<double> eeg({3, n});
  for (int64_t c = 0; c < 3; ++c) {
    for (int64_t i = 0; i < n; ++i) {
      double t = double(i) / fs;
      eeg.at(c, i) = std::sin(2 * M_PI * (4.0 + 3.0 * double(c)) * t) +
                     0.5 * std::sin(2 * M_PI * 23.0 * t + 0.3) +
                     0.1 * rng.normal();
    }
  }
  Tensor<double> rev({3, n});
  for (int64_t c = 0; c < 3; ++c) {
    for (int64_t i = 0; i < n; ++i) rev.at(c, i) = eeg.at(c, n - 1 - i);
  }
  Tensor<double> fa = eegsep::eeg::frequency_features(eeg, fs);
  Tensor<double> fb = eegsep::eeg::frequency_features(rev, fs);
  for (int64_t i = 0; i < fa.size(); ++i) {
    CHECK(std::abs(fa[i] - fb[i]) <=
          1e-12 * std::max(1.0, std::abs(fa[i])));
  }
}

TEST_CASE("features: precondition errors") {
  Tensor<double> ok({1, 256});
  CHECK_THROWS_AS(eegsep::eeg::frequency_features(ok, 80.0),
                  eegsep::ConfigError);
  Tensor<double> tiny({1, 16});
  CHECK_THROWS_AS(eegsep::eeg::frequency_features(tiny, 128.0),
                  eegsep::LengthError);
  Tensor<double> flat({256});
  CHECK_THROWS_AS(eegsep::eeg::frequency_features(flat, 128.0),
                  eegsep::DimError);
}

// ---------------------------------------------------------------------------
// Graph layer.

TEST_CASE("gcn: identity adjacency reduces to the residual MLP") {
  using eegsep::nn::add;
  using eegsep::nn::batch_norm;
  using eegsep::nn::elu;
  using eegsep::nn::matmul_lastdim;

  ParamRegistry<double> reg(21);
  Rng rng(3);
  Tensor<double> x = random_tensor<double>({2, 3, 4}, rng);
  Tensor<double> eye({3, 3});
  for (int64_t i = 0; i < 3; ++i) eye.at(i, i) = 1.0;

  Tensor<double> via_layer;
  {
    Workspace<double> ws(&reg);
    via_layer = eegsep::eeg::gcn_layer(ws, ws.input(x), eye,
                                       /*training=*/false, "g").value();
  }
  Tensor<double> manual;
  {
    // Same parameter names -> same tensors; adjacency mixing elided.
    Workspace<double> ws(&reg);
    Var<double> xin = ws.input(x);
    Var<double> w1 = ws.param_uniform("g.w1", {4, 4}, 4);
    Var<double> w2 = ws.param_uniform("g.w2", {4, 4}, 4);
    Var<double> g1 = ws.param_const("g.bn1.gamma", {4}, 1.0);
    Var<double> b1 = ws.param_const("g.bn1.beta", {4}, 0.0);
    Var<double> g2 = ws.param_const("g.bn2.gamma", {4}, 1.0);
    Var<double> b2 = ws.param_const("g.bn2.beta", {4}, 0.0);
    auto* m1 = &ws.buffer("g.bn1.run_mean", {4}, 0.0);
    auto* v1 = &ws.buffer("g.bn1.run_var", {4}, 1.0);
    auto* m2 = &ws.buffer("g.bn2.run_mean", {4}, 0.0);
    auto* v2 = &ws.buffer("g.bn2.run_var", {4}, 1.0);
    Var<double> h =
        elu(batch_norm(matmul_lastdim(xin, w1), g1, b1, 2, false, m1, v1));
    Var<double> y = add(matmul_lastdim(h, w2), xin);
    manual = elu(batch_norm(y, g2, b2, 2, false, m2, v2)).value();
  }
  REQUIRE(via_layer.shape() == manual.shape());
  for (int64_t i = 0; i < manual.size(); ++i) {
    CHECK(via_layer[i] == manual[i]);  // bitwise
  }
}

TEST_CASE("gcn: permutation equivariance") {
  ParamRegistry<double> reg(33);
  Rng rng(9);
  const int64_t c = 5, d = 3;
  Tensor<double> x = random_tensor<double>({1, c, d}, rng);
  Tensor<double> a({c, c});
  for (int64_t i = 0; i < c; ++i) {
    for (int64_t j = i; j < c; ++j) {
      double w = rng.uniform(0.0, 1.0);
      a.at(i, j) = w;
      a.at(j, i) = w;
    }
  }
  std::vector<int64_t> perm = {3, 0, 4, 1, 2};
  Tensor<double> px({1, c, d});
  Tensor<double> pa({c, c});
  for (int64_t i = 0; i < c; ++i) {
    for (int64_t k = 0; k < d; ++k) px.at(0, i, k) = x.at(0, perm[i], k);
    for (int64_t j = 0; j < c; ++j) pa.at(i, j) = a.at(perm[i], perm[j]);
  }

  auto run = [&](const Tensor<double>& xin, const Tensor<double>& adj) {
    Workspace<double> ws(&reg);
    return eegsep::eeg::gcn_layer(ws, ws.input(xin), adj, false, "pg").value();
  };
  Tensor<double> base = run(x, a);
  Tensor<double> permuted = run(px, pa);
  for (int64_t i = 0; i < c; ++i) {
    for (int64_t k = 0; k < d; ++k) {
      CHECK(std::abs(permuted.at(0, i, k) - base.at(0, perm[i], k)) <= 1e-12);
    }
  }
}

TEST_CASE("gcn: rejects bad adjacencies") {
  ParamRegistry<double> reg(1);
  Workspace<double> ws(&reg);
  Rng rng(2);
  Var<double> x = ws.input(random_tensor<double>({1, 3, 4}, rng));
  Tensor<double> asym({3, 3});
  asym.at(0, 1) = 1.0;  // no mirror entry
  for (int64_t i = 0; i < 3; ++i) asym.at(i, i) = 1.0;
  CHECK_THROWS_AS(eegsep::eeg::gcn_layer(ws, x, asym, false, "bad"),
                  eegsep::ConfigError);
  Tensor<double> wrong({4, 4});
  CHECK_THROWS_AS(eegsep::eeg::gcn_layer(ws, x, wrong, false, "bad2"),
                  eegsep::DimError);
}

TEST_CASE("grad: gcn layer") {
  ParamRegistry<double> reg(55);
  Rng rng(13);
  Tensor<double> x = random_tensor<double>({2, 3, 4}, rng);
  Tensor<double> a = eegsep::eeg::default_adjacency(3).cast<double>();
  for (bool training : {true, false}) {
    GradCheckReport rep = eegsep::nn::grad_check(
        reg,
        [&]() {
          Workspace<double> ws(&reg);
          Var<double> o =
              eegsep::eeg::gcn_layer(ws, ws.input(x), a, training, "gc");
          return weighted(o).value()[0];
        },
        [&]() {
          Workspace<double> ws(&reg);
          Var<double> o =
              eegsep::eeg::gcn_layer(ws, ws.input(x), a, training, "gc");
          ws.backward(weighted(o));
        });
    CAPTURE(training);
    CHECK(rep.max_rel_err < 1e-6);
  }
}

// ---------------------------------------------------------------------------
// Multi-scale temporal view.

TEST_CASE("multiscale: kernel widths and output shape") {
  eegsep::eeg::EegEncoderConfig cfg;
  cfg.electrodes = 3;
  cfg.fs = 128.0;
  CHECK(cfg.kernel_widths() == std::vector<int64_t>{64, 32, 16, 8, 4});
  CHECK(cfg.feature_width() == 32);
  CHECK_NOTHROW(cfg.validate());

  ParamRegistry<double> reg(5);
  Workspace<double> ws(&reg);
  Rng rng(1);
  Var<double> x = ws.input(random_tensor<double>({2, 3, 256}, rng));
  Var<double> out = eegsep::eeg::multiscale_temporal(ws, x, cfg, true);
  CHECK(out.shape() == Shape{2, 64, 3, 22});
  CHECK(out.value().all_finite());
}

TEST_CASE("multiscale: too-short EEG raises") {
  eegsep::eeg::EegEncoderConfig cfg;
  cfg.electrodes = 2;
  ParamRegistry<double> reg(5);
  Workspace<double> ws(&reg);
  Var<double> x = ws.input(Tensor<double>({1, 2, 32}));  // < widest kernel 64
  CHECK_THROWS_AS(eegsep::eeg::multiscale_temporal(ws, x, cfg, true),
                  eegsep::LengthError);
}

TEST_CASE("multiscale: zero input stays finite and deterministic") {
  eegsep::eeg::EegEncoderConfig cfg;
  cfg.electrodes = 2;
  cfg.scale_filters = 2;
  cfg.temporal_features = 6;
  ParamRegistry<double> reg(5);
  auto run = [&]() {
    Workspace<double> ws(&reg);
    Var<double> x = ws.input(Tensor<double>({1, 2, 128}));
    return eegsep::eeg::multiscale_temporal(ws, x, cfg, true).value();
  };
  Tensor<double> a = run();
  Tensor<double> b = run();
  CHECK(a.all_finite());
  for (int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

// ---------------------------------------------------------------------------
// Full EEG encoder.

namespace {

eegsep::eeg::EegEncoderConfig small_eeg_cfg() {
  eegsep::eeg::EegEncoderConfig cfg;
  cfg.electrodes = 4;
  cfg.fs = 128.0;
  cfg.scale_filters = 2;
  cfg.temporal_features = 6;  // feature width 16, divisible by 4 heads
  cfg.stride = 4;
  cfg.heads = 4;
  cfg.out_channels = 12;
  return cfg;
}

}  // namespace

TEST_CASE("encode_eeg: output shape and eval-mode purity") {
  eegsep::eeg::EegEncoderConfig cfg = small_eeg_cfg();
  Tensor<double> adj = eegsep::eeg::default_adjacency(cfg.electrodes);
  ParamRegistry<double> reg(77);
  Rng rng(17);
  Tensor<double> eeg = random_tensor<double>({2, 4, 256}, rng);

  auto run = [&](bool training) {
    Workspace<double> ws(&reg);
    return eegsep::eeg::encode_eeg(ws, eeg, cfg, adj, /*out_frames=*/101,
                                   training).value();
  };
  Tensor<double> warm = run(true);  // creates params, moves BN buffers
  CHECK(warm.shape() == Shape{2, 12, 101});
  Tensor<double> a = run(false);
  Tensor<double> b = run(false);
  CHECK(a.shape() == Shape{2, 12, 101});
  CHECK(a.all_finite());
  for (int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);  // bitwise
}

TEST_CASE("encode_eeg: channel mismatch raises") {
  eegsep::eeg::EegEncoderConfig cfg = small_eeg_cfg();
  Tensor<double> adj = eegsep::eeg::default_adjacency(cfg.electrodes);
  ParamRegistry<double> reg(1);
  Workspace<double> ws(&reg);
  Tensor<double> eeg({1, 5, 256});  // five channels, config says four
  CHECK_THROWS_AS(
      eegsep::eeg::encode_eeg(ws, eeg, cfg, adj, 50, false),
      eegsep::ConfigError);
}

TEST_CASE("encode_eeg: zeroed attention output leaves the projected graph features") {
  using namespace eegsep::nn;
  eegsep::eeg::EegEncoderConfig cfg = small_eeg_cfg();
  const int64_t b = 1, c = cfg.electrodes, t = 128;
  const int64_t tp = eegsep::eeg::multiscale_frames(t, cfg);
  const int64_t dw = cfg.feature_width();
  Tensor<double> adj = eegsep::eeg::default_adjacency(c);
  ParamRegistry<double> reg(91);
  Rng rng(23);
  Tensor<double> eeg = random_tensor<double>({b, c, t}, rng);

  // Materialize parameters, then cut the attention output path.
  {
    Workspace<double> ws(&reg);
    (void)eegsep::eeg::encode_eeg(ws, eeg, cfg, adj, 37, false);
  }
  reg.param("eeg.attn.wo").fill(0.0);
  reg.param("eeg.attn.bo").fill(0.0);

  Tensor<double> got;
  {
    Workspace<double> ws(&reg);
    got = eegsep::eeg::encode_eeg(ws, eeg, cfg, adj, 37, false).value();
  }

  // Manual composition without the attention block.
  Tensor<double> want;
  {
    Workspace<double> ws(&reg);
    Var<double> et = eegsep::eeg::multiscale_temporal(
        ws, ws.input(eeg), cfg, false, "eeg.ms");
    Var<double> gt = eegsep::eeg::gcn_layer(ws, et, adj, false, "eeg.t_gcn");
    Tensor<double> ef({b, c, eegsep::eeg::kFreqFeatureWidth});
    Tensor<double> one({c, t});
    for (int64_t i = 0; i < c * t; ++i) one[i] = eeg[i];
    Tensor<double> feat = eegsep::eeg::frequency_features(one, cfg.fs);
    for (int64_t i = 0; i < feat.size(); ++i) ef[i] = feat[i];
    Var<double> gf = eegsep::eeg::gcn_layer(ws, ws.input(ef), adj, false,
                                            "eeg.f_gcn");
    Var<double> z = add_bcast_trailing(
        concat<double>({gt, tile_axis1(gf, tp)}, 3),
        eegsep::eeg::positional_encoding<double>(c, dw));
    Var<double> flat = reshape(z, {b, tp, c * dw});
    Var<double> wp = ws.param_uniform("eeg.proj.w", {c * dw, cfg.out_channels},
                                      c * dw);
    Var<double> bp = ws.param_const("eeg.proj.b", {cfg.out_channels}, 0.0);
    Var<double> proj = add_lastdim_bias(matmul_lastdim(flat, wp), bp);
    want = interp_time(permute(proj, {0, 2, 1}), 37).value();
  }
  REQUIRE(got.shape() == want.shape());
  for (int64_t i = 0; i < got.size(); ++i) CHECK(got[i] == want[i]);
}

TEST_CASE("grad: full eeg encoder") {
  eegsep::eeg::EegEncoderConfig cfg;
  cfg.electrodes = 4;
  cfg.fs = 128.0;  // widths {64, 32, 16, 8, 4}
  cfg.scale_filters = 1;
  cfg.temporal_features = 2;  // feature width 12
  cfg.stride = 4;
  cfg.heads = 4;
  cfg.out_channels = 3;
  CHECK_NOTHROW(cfg.validate());
  Tensor<double> adj = eegsep::eeg::default_adjacency(cfg.electrodes);
  ParamRegistry<double> reg(101);
  Rng rng(29);
  Tensor<double> eeg = random_tensor<double>({1, 4, 64}, rng);

  GradCheckReport rep = eegsep::nn::grad_check(
      reg,
      [&]() {
        Workspace<double> ws(&reg);
        Var<double> o = eegsep::eeg::encode_eeg(ws, eeg, cfg, adj, 9, true);
        return weighted(o).value()[0];
      },
      [&]() {
        Workspace<double> ws(&reg);
        Var<double> o = eegsep::eeg::encode_eeg(ws, eeg, cfg, adj, 9, true);
        ws.backward(weighted(o));
      });
  CAPTURE(rep.worst_param);
  CAPTURE(rep.analytic);
  CAPTURE(rep.numeric);
  CHECK(rep.max_rel_err < 1e-6);
}

// ---------------------------------------------------------------------------
// Separator: fusion, attention/memory blocks, mask.

namespace {

eegsep::sep::SeparatorConfig tiny_sep_cfg(int64_t channels) {
  eegsep::sep::SeparatorConfig cfg;
  cfg.channels = channels;
  cfg.blocks = 1;
  cfg.chunk = 4;
  cfg.fsmn_taps = 3;
  cfg.fsmn_dilations = {1, 2};
  return cfg;
}

}  // namespace

TEST_CASE("fuse: shape, zero-EEG reduction, linearity") {
  ParamRegistry<double> reg(7);
  Rng rng(31);
  const int64_t b = 2, c = 5, ce = 3, d = 7;
  Tensor<double> sp = random_tensor<double>({b, c, d}, rng);
  Tensor<double> ee = random_tensor<double>({b, ce, d}, rng);

  auto run = [&](const Tensor<double>& s, const Tensor<double>& e) {
    Workspace<double> ws(&reg);
    return eegsep::sep::fuse(ws, ws.input(s), ws.input(e)).value();
  };
  Tensor<double> out = run(sp, ee);
  CHECK(out.shape() == Shape{b, c, d});

  // EEG = 0: only the speech sub-kernel contributes.
  Tensor<double> zeeg({b, ce, d});
  Tensor<double> out0 = run(sp, zeeg);
  const Tensor<double>& w = reg.param("fuse.w");  // (c, c+ce, 1)
  for (int64_t bi = 0; bi < b; ++bi) {
    for (int64_t co = 0; co < c; ++co) {
      for (int64_t t = 0; t < d; ++t) {
        double want = 0;
        for (int64_t ci = 0; ci < c; ++ci) {
          want += w.at(co, ci, 0) * sp.at(bi, ci, t);
        }
        CHECK(std::abs(out0.at(bi, co, t) - want) <=
              1e-12 * std::max(1.0, std::abs(want)));
      }
    }
  }

  // Bias-free merge is linear in both inputs.
  Tensor<double> sp2 = random_tensor<double>({b, c, d}, rng);
  Tensor<double> ee2 = random_tensor<double>({b, ce, d}, rng);
  const double al = 0.7, be = -1.3;
  Tensor<double> mix_s(sp.shape()), mix_e(ee.shape());
  for (int64_t i = 0; i < sp.size(); ++i) mix_s[i] = al * sp[i] + be * sp2[i];
  for (int64_t i = 0; i < ee.size(); ++i) mix_e[i] = al * ee[i] + be * ee2[i];
  Tensor<double> lhs = run(mix_s, mix_e);
  Tensor<double> r1 = run(sp, ee), r2 = run(sp2, ee2);
  double num = 0, den = 0;
  for (int64_t i = 0; i < lhs.size(); ++i) {
    double want = al * r1[i] + be * r2[i];
    num += (lhs[i] - want) * (lhs[i] - want);
    den += want * want;
  }
  CHECK(std::sqrt(num / std::max(den, 1e-300)) < 1e-10);

  // Time-axis mismatch.
  Workspace<double> ws(&reg);
  Var<double> good = ws.input(sp);
  Var<double> short_e = ws.input(Tensor<double>({b, ce, d - 1}));
  CHECK_THROWS_AS(eegsep::sep::fuse(ws, good, short_e), eegsep::DimError);
}

TEST_CASE("gated attention block: shape and zeroed-conv residual identity") {
  eegsep::sep::SeparatorConfig cfg = tiny_sep_cfg(6);
  ParamRegistry<double> reg(41);
  Rng rng(37);
  Tensor<double> x = random_tensor<double>({2, 6, 10}, rng);

  auto run = [&]() {
    Workspace<double> ws(&reg);
    return eegsep::sep::gated_attention_block(ws, ws.input(x), cfg, "mb").value();
  };
  Tensor<double> out = run();
  CHECK(out.shape() == x.shape());
  CHECK(out.all_finite());
  reg.param("mb.m.w").fill(0.0);
  reg.param("mb.m.b").fill(0.0);
  Tensor<double> res = run();
  for (int64_t i = 0; i < res.size(); ++i) CHECK(res[i] == x[i]);  // bitwise
}

TEST_CASE("recurrent block: shape and zeroed-gate residual identity") {
  eegsep::sep::SeparatorConfig cfg = tiny_sep_cfg(4);
  ParamRegistry<double> reg(43);
  Rng rng(39);
  Tensor<double> x = random_tensor<double>({2, 4, 12}, rng);

  auto run = [&]() {
    Workspace<double> ws(&reg);
    return eegsep::sep::recurrent_block(ws, ws.input(x), cfg, "rb").value();
  };
  Tensor<double> out = run();
  CHECK(out.shape() == x.shape());
  reg.param("rb.u.w").fill(0.0);
  reg.param("rb.u.b").fill(0.0);
  Tensor<double> res = run();
  for (int64_t i = 0; i < res.size(); ++i) CHECK(res[i] == x[i]);  // bitwise
}

TEST_CASE("fsmn: impulse-response support matches the dilation formula") {
  eegsep::sep::SeparatorConfig cfg;
  cfg.channels = 3;
  cfg.fsmn_taps = 8;
  cfg.fsmn_dilations = {1, 2, 4, 8};
  CHECK(cfg.fsmn_support() == 106);

  ParamRegistry<double> reg(47);
  const int64_t d = 160, t0 = 80;
  auto run = [&](const Tensor<double>& x) {
    Workspace<double> ws(&reg);
    return eegsep::sep::dilated_fsmn(ws, ws.input(x), cfg, "fs").value();
  };
  Tensor<double> zero({1, 3, d});
  Tensor<double> imp({1, 3, d});
  imp.at(0, 1, t0) = 1.0;
  Tensor<double> base = run(zero);
  Tensor<double> resp = run(imp);

  // Depthwise taps are centered: per stage the reach is 3*dil to the left
  // and 4*dil to the right (8 taps), so the response difference may only
  // occupy [t0 - 45, t0 + 60] - 106 frames in total.
  int64_t lo = d, hi = -1;
  for (int64_t t = 0; t < d; ++t) {
    bool nz = false;
    for (int64_t c = 0; c < 3; ++c) {
      if (resp.at(0, c, t) != base.at(0, c, t)) nz = true;
    }
    if (nz) {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  CHECK(lo == t0 - 45);
  CHECK(hi == t0 + 60);
  CHECK(hi - lo + 1 == cfg.fsmn_support());
}

TEST_CASE("estimate_mask: nonnegative, shape-preserving, config-checked") {
  eegsep::sep::SeparatorConfig cfg = tiny_sep_cfg(5);
  cfg.blocks = 2;
  ParamRegistry<double> reg(53);
  Rng rng(41);
  Tensor<double> x = random_tensor<double>({1, 5, 11}, rng);
  Workspace<double> ws(&reg);
  Var<double> m = eegsep::sep::estimate_mask(ws, ws.input(x), cfg);
  CHECK(m.shape() == x.shape());
  double mn = 1e300;
  for (int64_t i = 0; i < m.value().size(); ++i) mn = std::min(mn, m.value()[i]);
  CHECK(mn >= 0.0);

  eegsep::sep::SeparatorConfig bad = cfg;
  bad.blocks = 0;
  CHECK_THROWS_AS(bad.validate(), eegsep::ConfigError);
  bad = cfg;
  bad.fsmn_dilations = {2, 2};
  CHECK_THROWS_AS(bad.validate(), eegsep::ConfigError);
  bad = cfg;
  bad.mask_activation = "tanh";
  CHECK_THROWS_AS(bad.validate(), eegsep::ConfigError);
}

TEST_CASE("apply_mask: identity, annihilator, scalar-loop oracle") {
  ParamRegistry<double> reg(3);
  Rng rng(59);
  Tensor<double> x = random_tensor<double>({2, 3, 5}, rng);
  Tensor<double> m = random_tensor<double>({2, 3, 5}, rng, 0.0, 2.0);

  Workspace<double> ws(&reg);
  Var<double> xv = ws.input(x);
  Var<double> ones = ws.input([&] {
    Tensor<double> t(x.shape());
    t.fill(1.0);
    return t;
  }());
  Var<double> id = eegsep::sep::apply_mask(xv, ones);
  for (int64_t i = 0; i < x.size(); ++i) CHECK(id.value()[i] == x[i]);

  Var<double> zeros = ws.input(Tensor<double>(x.shape()));
  Var<double> ann = eegsep::sep::apply_mask(xv, zeros);
  for (int64_t i = 0; i < x.size(); ++i) CHECK(ann.value()[i] == 0.0);

  Var<double> mv = ws.input(m);
  Var<double> prod = eegsep::sep::apply_mask(xv, mv);
  for (int64_t i = 0; i < x.size(); ++i) CHECK(prod.value()[i] == x[i] * m[i]);

  Var<double> small = ws.input(Tensor<double>({2, 3, 4}));
  CHECK_THROWS_AS(eegsep::sep::apply_mask(xv, small), eegsep::DimError);
}

TEST_CASE("grad: separator blocks") {
  Rng rng(61);
  {
    eegsep::sep::SeparatorConfig cfg = tiny_sep_cfg(3);
    ParamRegistry<double> reg(63);
    Tensor<double> x = random_tensor<double>({1, 3, 9}, rng);  // 3 chunks
    GradCheckReport rep = eegsep::nn::grad_check(
        reg,
        [&]() {
          Workspace<double> ws(&reg);
          return weighted(eegsep::sep::gated_attention_block(ws, ws.input(x), cfg,
                                                        "g1")).value()[0];
        },
        [&]() {
          Workspace<double> ws(&reg);
          ws.backward(weighted(
              eegsep::sep::gated_attention_block(ws, ws.input(x), cfg, "g1")));
        });
    CAPTURE(rep.worst_param);
    CHECK(rep.max_rel_err < 1e-6);
  }
  {
    eegsep::sep::SeparatorConfig cfg = tiny_sep_cfg(2);
    ParamRegistry<double> reg(67);
    Tensor<double> x = random_tensor<double>({1, 2, 12}, rng);
    GradCheckReport rep = eegsep::nn::grad_check(
        reg,
        [&]() {
          Workspace<double> ws(&reg);
          return weighted(eegsep::sep::recurrent_block(ws, ws.input(x), cfg,
                                                       "g2")).value()[0];
        },
        [&]() {
          Workspace<double> ws(&reg);
          ws.backward(weighted(
              eegsep::sep::recurrent_block(ws, ws.input(x), cfg, "g2")));
        });
    CAPTURE(rep.worst_param);
    CHECK(rep.max_rel_err < 1e-6);
  }
  {
    // Fuse -> mask -> apply, end to end.
    eegsep::sep::SeparatorConfig cfg = tiny_sep_cfg(3);
    ParamRegistry<double> reg(71);
    Tensor<double> sp = random_tensor<double>({1, 3, 8}, rng);
    Tensor<double> ee = random_tensor<double>({1, 2, 8}, rng);
    auto chain = [&](Workspace<double>& ws) {
      Var<double> spv = ws.input(sp);
      Var<double> f = eegsep::sep::fuse(ws, spv, ws.input(ee));
      Var<double> m = eegsep::sep::estimate_mask(ws, f, cfg);
      return eegsep::sep::apply_mask(spv, m);
    };
    GradCheckReport rep = eegsep::nn::grad_check(
        reg,
        [&]() {
          Workspace<double> ws(&reg);
          return weighted(chain(ws)).value()[0];
        },
        [&]() {
          Workspace<double> ws(&reg);
          ws.backward(weighted(chain(ws)));
        });
    CAPTURE(rep.worst_param);
    CHECK(rep.max_rel_err < 1e-6);
  }
}
