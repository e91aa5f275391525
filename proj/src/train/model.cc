// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "train/model.h"

#include <cstdlib>
#include <utility>

#include "common/error.h"
#include "common/rng.h"
#include "common/text.h"
#include "eeg/adjacency.h"
#include "nn/ops.h"

namespace eegsep::train {
namespace {

// Rethrows the current module error with the pipeline stage prepended,
// preserving the concrete error type so callers can still dispatch on it.
template <typename Fn>
auto stage(const char* tag, Fn&& fn) -> decltype(fn()) {
  auto tagged = [&](const auto& e) { return std::string(tag) + ": " + e.what(); };
  try {
    return fn();
  } catch (const DimError& e) {
    throw DimError(tagged(e));
  } catch (const LengthError& e) {
    throw LengthError(tagged(e));
  } catch (const ConfigError& e) {
    throw ConfigError(tagged(e));
  } catch (const FormatError& e) {
    throw FormatError(tagged(e));
  } catch (const ValueError& e) {
    throw ValueError(tagged(e));
  } catch (const Error& e) {
    throw Error(tagged(e));
  }
}

int64_t parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("key " + key + ": cannot parse integer '" + value + "'");
  }
  return static_cast<int64_t>(v);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("key " + key + ": cannot parse number '" + value + "'");
  }
  return v;
}

std::vector<int64_t> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int64_t> out;
  for (const std::string& part : split_on(value, ',')) {
    out.push_back(parse_int(key, trim(part)));
  }
  return out;
}

std::string join_ints(const std::vector<int64_t>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

void ModelConfig::validate() const {
  codec.validate();
  eeg.validate();
  sep.validate();
  if (sep.channels != codec.channels) {
    throw ConfigError(strprintf(
        "separator channels (%lld) must match codec channels (%lld)",
        static_cast<long long>(sep.channels), static_cast<long long>(codec.channels)));
  }
}

std::string ModelConfig::canonical_text() const {
  std::string s;
  s += strprintf("codec.channels %lld\n", static_cast<long long>(codec.channels));
  s += strprintf("codec.kernel_len %lld\n", static_cast<long long>(codec.kernel_len));
  s += strprintf("eeg.electrodes %lld\n", static_cast<long long>(eeg.electrodes));
  s += "eeg.fs " + fmt_full(eeg.fs) + "\n";
  s += strprintf("eeg.heads %lld\n", static_cast<long long>(eeg.heads));
  s += strprintf("eeg.out_channels %lld\n", static_cast<long long>(eeg.out_channels));
  s += strprintf("eeg.scale_filters %lld\n", static_cast<long long>(eeg.scale_filters));
  s += strprintf("eeg.stride %lld\n", static_cast<long long>(eeg.stride));
  s += strprintf("eeg.temporal_features %lld\n",
                 static_cast<long long>(eeg.temporal_features));
  s += strprintf("sep.blocks %lld\n", static_cast<long long>(sep.blocks));
  s += strprintf("sep.channels %lld\n", static_cast<long long>(sep.channels));
  s += strprintf("sep.chunk %lld\n", static_cast<long long>(sep.chunk));
  s += "sep.fsmn_dilations " + join_ints(sep.fsmn_dilations) + "\n";
  s += strprintf("sep.fsmn_taps %lld\n", static_cast<long long>(sep.fsmn_taps));
  s += "sep.mask_activation " + sep.mask_activation + "\n";
  return s;
}

uint64_t ModelConfig::hash() const {
  std::string text = canonical_text();
  return fnv1a64(text.data(), text.size());
}

bool apply_model_kv(ModelConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "codec.channels") {
    cfg.codec.channels = parse_int(key, value);
  } else if (key == "codec.kernel_len") {
    cfg.codec.kernel_len = parse_int(key, value);
  } else if (key == "eeg.electrodes") {
    cfg.eeg.electrodes = parse_int(key, value);
  } else if (key == "eeg.fs") {
    cfg.eeg.fs = parse_double(key, value);
  } else if (key == "eeg.heads") {
    cfg.eeg.heads = parse_int(key, value);
  } else if (key == "eeg.out_channels") {
    cfg.eeg.out_channels = parse_int(key, value);
  } else if (key == "eeg.scale_filters") {
    cfg.eeg.scale_filters = parse_int(key, value);
  } else if (key == "eeg.stride") {
    cfg.eeg.stride = parse_int(key, value);
  } else if (key == "eeg.temporal_features") {
    cfg.eeg.temporal_features = parse_int(key, value);
  } else if (key == "sep.blocks" || key == "separator.R") {
    cfg.sep.blocks = parse_int(key, value);
  } else if (key == "sep.channels") {
    cfg.sep.channels = parse_int(key, value);
  } else if (key == "sep.chunk") {
    cfg.sep.chunk = parse_int(key, value);
  } else if (key == "sep.fsmn_dilations") {
    cfg.sep.fsmn_dilations = parse_int_list(key, value);
  } else if (key == "sep.fsmn_taps") {
    cfg.sep.fsmn_taps = parse_int(key, value);
  } else if (key == "sep.mask_activation") {
    cfg.sep.mask_activation = value;
  } else {
    return false;
  }
  return true;
}

ModelConfig model_config_from(const std::map<std::string, std::string>& kv) {
  ModelConfig cfg;
  for (const auto& [key, value] : kv) {
    if (!apply_model_kv(cfg, key, value)) {
      throw ConfigError("unknown model config key: " + key);
    }
  }
  return cfg;
}

nn::Var<double> model_forward(nn::Workspace<double>& ws,
                              const std::vector<double>& mixture,
                              const nn::Tensor<double>& eeg_ct,
                              const ModelConfig& cfg,
                              const nn::Tensor<double>& adjacency, bool training) {
  cfg.validate();
  const int64_t t = static_cast<int64_t>(mixture.size());
  if (t < 1) throw LengthError("model_forward: empty mixture");
  if (eeg_ct.rank() != 2) {
    throw DimError("model_forward: eeg must be (electrodes, samples), got " +
                   nn::shape_str(eeg_ct.shape()));
  }

  nn::Var<double> x = ws.input(nn::Tensor<double>({1, 1, t}, mixture));
  nn::Var<double> emb =
      stage("encode_speech", [&] { return codec::encode_speech(ws, x, cfg.codec); });
  const int64_t frames = emb.shape()[2];

  nn::Tensor<double> eeg_b({1, eeg_ct.shape()[0], eeg_ct.shape()[1]},
                           std::vector<double>(eeg_ct.data(),
                                               eeg_ct.data() + eeg_ct.size()));
  nn::Var<double> brain = stage("encode_eeg", [&] {
    return eeg::encode_eeg(ws, eeg_b, cfg.eeg, adjacency, frames, training);
  });

  nn::Var<double> fused =
      stage("fuse", [&] { return sep::fuse(ws, emb, brain); });
  nn::Var<double> mask =
      stage("estimate_mask", [&] { return sep::estimate_mask(ws, fused, cfg.sep); });
  nn::Var<double> masked =
      stage("apply_mask", [&] { return sep::apply_mask(emb, mask); });
  nn::Var<double> decoded =
      stage("decode_speech", [&] { return codec::decode_speech(ws, masked, cfg.codec); });

  // The decoder covers at least T samples (padding rounds frames up); trim.
  return nn::narrow(decoded, 2, 0, t);
}

nn::Var<double> model_forward(nn::Workspace<double>& ws,
                              const std::vector<double>& mixture,
                              const nn::Tensor<double>& eeg_ct,
                              const ModelConfig& cfg, bool training) {
  return model_forward(ws, mixture, eeg_ct, cfg,
                       eeg::default_adjacency(cfg.eeg.electrodes), training);
}

}  // namespace eegsep::train
