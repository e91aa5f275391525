// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cli/gradcheck_suite.h"

#include <chrono>
#include <functional>

#include "codec/codec.h"
#include "common/error.h"
#include "common/rng.h"
#include "common/text.h"
#include "eeg/encoder.h"
#include "metrics/si_sdr.h"
#include "nn/attention.h"
#include "nn/grad_check.h"
#include "nn/ops.h"
#include "nn/ops_conv.h"
#include "nn/ops_norm.h"
#include "sep/separator.h"

namespace eegsep::cli {
namespace {

using nn::Var;
using nn::Workspace;
using Builder = std::function<Var<double>(Workspace<double>&)>;

// Reduce an arbitrary-shaped output to a scalar through a fixed random
// probe, so every output entry contributes a distinct gradient path.
Var<double> probe_sum(Workspace<double>& ws, Var<double> y, uint64_t salt) {
  const nn::Shape s = y.shape();  // copy; the ref dies on the next emit
  nn::Tensor<double> w(s);
  Rng rng(salt ^ 0x70726f6265ULL);
  for (int64_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-1.0, 1.0);
  return nn::sum_all(nn::mul(y, ws.input(std::move(w))));
}

nn::Tensor<double> random_tensor(nn::Shape shape, uint64_t seed) {
  nn::Tensor<double> t(std::move(shape));
  Rng rng(seed);
  for (int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
  return t;
}

// Symmetric nonnegative adjacency with self-loops for graph-layer cases.
nn::Tensor<double> random_adjacency(int64_t c, uint64_t seed) {
  nn::Tensor<double> a({c, c});
  Rng rng(seed);
  for (int64_t i = 0; i < c; ++i) {
    a.at(i, i) = 1.0;
    for (int64_t j = i + 1; j < c; ++j) {
      double v = rng.uniform(0.1, 1.0);
      a.at(i, j) = v;
      a.at(j, i) = v;
    }
  }
  return a;
}

sep::SeparatorConfig tiny_sep() {
  sep::SeparatorConfig cfg;
  cfg.channels = 4;
  cfg.blocks = 1;
  cfg.chunk = 4;
  cfg.fsmn_taps = 3;
  cfg.fsmn_dilations = {1, 2};
  return cfg;
}

struct Case {
  const char* name;
  Builder build;
};

std::vector<Case> make_cases() {
  std::vector<Case> cases;

  cases.push_back({"pointwise_gates", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {24}, 1);
    Var<double> y = ws.param_uniform("y", {24}, 1);
    Var<double> gated = nn::mul(nn::sigmoid(x), nn::elu(y));
    Var<double> out = nn::add(gated, nn::relu(nn::add_const(x, 0.05)));
    return probe_sum(ws, out, 1);
  }});

  cases.push_back({"affine_bias", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {2, 3, 4}, 4);
    Var<double> w = ws.param_uniform("w", {4, 5}, 4);
    Var<double> b = ws.param_uniform("b", {5}, 1);
    Var<double> y = nn::add_lastdim_bias(nn::matmul_lastdim(x, w), b);
    Var<double> m = ws.param_uniform("m", {3, 3}, 3);
    Var<double> n = ws.param_uniform("n", {3, 2}, 3);
    return nn::add(probe_sum(ws, y, 2), probe_sum(ws, nn::matmul(m, n), 3));
  }});

  cases.push_back({"conv_strided", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {1, 2, 12}, 2);
    Var<double> w = ws.param_uniform("w", {3, 2, 4}, 8);
    return probe_sum(ws, nn::conv1d(x, w, 2, 1, 2), 4);
  }});

  cases.push_back({"conv_transpose", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {1, 3, 5}, 3);
    Var<double> w = ws.param_uniform("w", {3, 2, 4}, 12);
    return probe_sum(ws, nn::conv1d_transpose(x, w, 2), 5);
  }});

  cases.push_back({"conv_depthwise_dilated", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {1, 3, 10}, 3);
    Var<double> w = ws.param_uniform("w", {3, 3}, 3);
    return probe_sum(ws, nn::depthwise_conv1d(x, w, 2), 6);
  }});

  cases.push_back({"batchnorm_elu_train", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {2, 3, 7}, 3);
    Var<double> g = ws.param_uniform("gamma", {3}, 1);
    Var<double> b = ws.param_uniform("beta", {3}, 1);
    nn::Tensor<double>* m = &ws.buffer("run_mean", {3}, 0.0);
    nn::Tensor<double>* v = &ws.buffer("run_var", {3}, 1.0);
    return probe_sum(ws, nn::bn_elu(x, g, b, 1, /*training=*/true, m, v), 7);
  }});

  cases.push_back({"tensor_moves", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {2, 3, 4}, 4);
    Var<double> p = nn::permute(x, {0, 2, 1});          // (2, 4, 3)
    Var<double> r = nn::reshape(p, {2, 12});
    Var<double> nw = nn::narrow(r, 1, 2, 8);            // (2, 8)
    Var<double> t = nn::tile_axis1(nn::reshape(nw, {2, 4, 2}), 3);  // (2,3,4,2)
    Var<double> bc = nn::add_bcast_trailing(t, random_tensor({4, 2}, 71));
    Var<double> cb = ws.param_uniform("cbias", {3}, 1);
    Var<double> y = nn::add_channel_bias(nn::reshape(bc, {2, 3, 8}), cb);
    return probe_sum(ws, y, 8);
  }});

  cases.push_back({"row_softmax_scale", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {3, 5}, 5);
    Var<double> s = ws.param_uniform("s", {3}, 1);
    return probe_sum(ws, nn::rows_scale(nn::softmax_rows(x), s), 9);
  }});

  cases.push_back({"attention_local_global", [](Workspace<double>& ws) {
    Var<double> q = ws.param_uniform("q", {6, 4}, 4);
    Var<double> k = ws.param_uniform("k", {6, 4}, 4);
    Var<double> v = ws.param_uniform("v", {6, 4}, 4);
    return probe_sum(ws, nn::attend_local_global(q, k, v, 3), 10);
  }});

  cases.push_back({"attention_multihead", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {5, 8}, 8);
    Var<double> wq = ws.param_uniform("wq", {8, 8}, 8);
    Var<double> wk = ws.param_uniform("wk", {8, 8}, 8);
    Var<double> wv = ws.param_uniform("wv", {8, 8}, 8);
    Var<double> wo = ws.param_uniform("wo", {8, 8}, 8);
    Var<double> bq = ws.param_uniform("bq", {8}, 1);
    Var<double> bk = ws.param_uniform("bk", {8}, 1);
    Var<double> bv = ws.param_uniform("bv", {8}, 1);
    Var<double> bo = ws.param_uniform("bo", {8}, 1);
    Var<double> y =
        nn::multihead_self_attention(x, wq, wk, wv, wo, bq, bk, bv, bo, 2);
    return probe_sum(ws, y, 11);
  }});

  cases.push_back({"electrode_graph_layer", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {2, 3, 4}, 4);
    nn::Tensor<double> a = random_adjacency(3, 12);
    Var<double> y = eeg::gcn_layer(ws, x, a, /*training=*/true, "g");
    return probe_sum(ws, y, 13);
  }});

  cases.push_back({"adjacency_mix", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {2, 3, 4}, 4);
    return probe_sum(ws, nn::adjacency_mix(x, random_adjacency(3, 14)), 15);
  }});

  cases.push_back({"time_interp", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {1, 3, 5}, 5);
    Var<double> up = nn::interp_time(x, 9);
    Var<double> down = nn::interp_time(x, 2);
    return nn::add(probe_sum(ws, up, 16), probe_sum(ws, down, 17));
  }});

  cases.push_back({"codec_roundtrip", [](Workspace<double>& ws) {
    codec::CodecConfig cfg;
    cfg.kernel_len = 8;
    cfg.channels = 6;
    Var<double> x = ws.param_uniform("x", {1, 1, 24}, 1);
    Var<double> emb = codec::encode_speech(ws, x, cfg, "cd");
    return probe_sum(ws, codec::decode_speech(ws, emb, cfg, "cd"), 18);
  }});

  cases.push_back({"memory_fsmn", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {1, 4, 6}, 4);
    return probe_sum(ws, sep::dilated_fsmn(ws, x, tiny_sep(), "f"), 19);
  }});

  cases.push_back({"attention_block", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {1, 4, 8}, 4);
    return probe_sum(ws, sep::gated_attention_block(ws, x, tiny_sep(), "a"), 20);
  }});

  cases.push_back({"memory_block", [](Workspace<double>& ws) {
    Var<double> x = ws.param_uniform("x", {1, 4, 6}, 4);
    return probe_sum(ws, sep::recurrent_block(ws, x, tiny_sep(), "m"), 21);
  }});

  cases.push_back({"mask_chain", [](Workspace<double>& ws) {
    Var<double> speech = ws.param_uniform("speech", {1, 4, 8}, 4);
    Var<double> eegf = ws.param_uniform("eegf", {1, 3, 8}, 3);
    Var<double> fused = sep::fuse(ws, speech, eegf, "fu");
    Var<double> mask = sep::estimate_mask(ws, fused, tiny_sep(), "s");
    return probe_sum(ws, sep::apply_mask(fused, mask), 22);
  }});

  cases.push_back({"si_sdr_loss", [](Workspace<double>& ws) {
    Var<double> est = ws.param_uniform("est", {40}, 1);
    return metrics::si_sdr_loss(est, random_tensor({40}, 23));
  }});

  return cases;
}

}  // namespace

std::vector<std::string> gradcheck_case_names() {
  std::vector<std::string> names;
  for (const Case& c : make_cases()) names.emplace_back(c.name);
  return names;
}

std::vector<GradCheckRow> run_gradcheck_suite(const std::string& corrupt_op) {
  std::vector<Case> cases = make_cases();
  if (!corrupt_op.empty()) {
    bool known = false;
    for (const Case& c : cases) known = known || corrupt_op == c.name;
    if (!known) {
      std::string names;
      for (const Case& c : cases) names += std::string(" ") + c.name;
      throw ConfigError("no gradient case named '" + corrupt_op +
                        "'; cases:" + names);
    }
  }

  std::vector<GradCheckRow> rows;
  for (const Case& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    // Fresh registry per case; per-name init keyed off the case name.
    const std::string cname = c.name;
    nn::ParamRegistry<double> reg(fnv1a64(cname.data(), cname.size()));
    const bool corrupt = corrupt_op == cname;

    auto forward_value = [&]() {
      Workspace<double> ws(&reg);
      return c.build(ws).value()[0];
    };
    auto analytic = [&]() {
      Workspace<double> ws(&reg);
      ws.backward(c.build(ws));
      if (corrupt) {
        auto& grads = reg.grads();
        if (!grads.empty()) reg.grad(grads.begin()->first)[0] += 0.5;
      }
    };

    nn::GradCheckReport rep = nn::grad_check(reg, forward_value, analytic);
    GradCheckRow row;
    row.name = c.name;
    row.max_rel_err = rep.max_rel_err;
    row.worst_param = rep.worst_param;
    row.checked = rep.checked;
    row.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0).count();
    row.pass = rep.max_rel_err < kGradTolerance;
    rows.push_back(row);
  }
  return rows;
}

bool gradcheck_all_pass(const std::vector<GradCheckRow>& rows) {
  for (const GradCheckRow& r : rows) {
    if (!r.pass) return false;
  }
  return !rows.empty();
}

std::string gradcheck_table(const std::vector<GradCheckRow>& rows) {
  std::string out = strprintf("%-26s %12s %8s %8s  %s\n", "case", "max_rel_err",
                              "checked", "seconds", "status");
  double total_s = 0.0;
  int64_t total_checked = 0;
  for (const GradCheckRow& r : rows) {
    out += strprintf("%-26s %12.3e %8lld %8.3f  %s\n", r.name.c_str(),
                     r.max_rel_err, static_cast<long long>(r.checked),
                     r.seconds, r.pass ? "pass" : "FAIL");
    total_s += r.seconds;
    total_checked += r.checked;
  }
  out += strprintf("%-26s %12s %8lld %8.3f  %s\n", "total", "",
                   static_cast<long long>(total_checked), total_s,
                   gradcheck_all_pass(rows) ? "pass" : "FAIL");
  return out;
}

}  // namespace eegsep::cli
