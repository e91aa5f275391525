// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cli/run_config.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>

#include "common/error.h"
#include "common/text.h"

namespace eegsep::cli {
namespace {

int64_t parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("key " + key + ": cannot parse integer '" + value + "'");
  }
  return static_cast<int64_t>(v);
}

uint64_t parse_uint(const std::string& key, const std::string& value) {
  char* end = nullptr;
  unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("key " + key + ": cannot parse integer '" + value + "'");
  }
  return static_cast<uint64_t>(v);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("key " + key + ": cannot parse number '" + value + "'");
  }
  return v;
}

bool apply_train_kv(train::TrainConfig& t, const std::string& key,
                    const std::string& value) {
  if (key == "train.epochs") {
    t.epochs = parse_int(key, value);
  } else if (key == "train.batch_size") {
    t.batch_size = parse_int(key, value);
  } else if (key == "train.lr") {
    t.lr = parse_double(key, value);
  } else if (key == "train.lr_decay") {
    t.lr_decay = parse_double(key, value);
  } else if (key == "train.lr_decay_every") {
    t.lr_decay_every = parse_int(key, value);
  } else if (key == "train.grad_clip") {
    t.grad_clip = parse_double(key, value);
  } else if (key == "train.crop_s") {
    t.crop_s = parse_double(key, value);
  } else if (key == "train.seed") {
    t.seed = parse_uint(key, value);
  } else if (key == "train.max_steps") {
    t.max_steps = parse_int(key, value);
  } else {
    return false;
  }
  return true;
}

bool apply_data_kv(DataConfig& d, const std::string& key, const std::string& value) {
  if (key == "data.dir") {
    d.dir = value;
  } else if (key == "data.fs_audio") {
    d.fs_audio = parse_double(key, value);
  } else if (key == "data.fs_eeg") {
    d.fs_eeg = parse_double(key, value);
  } else if (key == "data.duration_s") {
    d.duration_s = parse_double(key, value);
  } else if (key == "data.eeg_channels") {
    d.eeg_channels = parse_int(key, value);
  } else if (key == "data.sir_db") {
    d.sir_db = parse_double(key, value);
  } else if (key == "data.eeg_snr_db") {
    d.eeg_snr_db = parse_double(key, value);
  } else if (key == "data.train_frac") {
    d.train_frac = parse_double(key, value);
  } else if (key == "data.validation_frac") {
    d.validation_frac = parse_double(key, value);
  } else if (key == "data.test_frac") {
    d.test_frac = parse_double(key, value);
  } else {
    return false;
  }
  return true;
}

}  // namespace

data::SceneConfig DataConfig::scene_config() const {
  data::SceneConfig sc;
  sc.fs_audio = fs_audio;
  sc.fs_eeg = fs_eeg;
  sc.duration_s = duration_s;
  sc.eeg_channels = eeg_channels;
  sc.sir_db = sir_db;
  sc.eeg_snr_db = eeg_snr_db;
  return sc;
}

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (train::apply_model_kv(cfg.model, key, value)) return;
  if (apply_train_kv(cfg.train, key, value)) return;
  if (apply_data_kv(cfg.data, key, value)) return;
  if (key == "run.root") {
    cfg.run_root = value;
    return;
  }
  if (key == "run.name") {
    cfg.run_name = value;
    return;
  }
  throw ConfigError("unknown config key: " + key);
}

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides) {
  RunConfig cfg;
  const char* env_root = std::getenv("EEGSEP_RUN_ROOT");
  cfg.run_root = env_root ? env_root : "runs";

  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::string line;
    std::vector<std::string> problems;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string s = trim(line);
      if (s.empty() || s[0] == '#') continue;
      size_t sp = s.find_first_of(" \t");
      std::string key = sp == std::string::npos ? s : s.substr(0, sp);
      std::string value = sp == std::string::npos ? "" : trim(s.substr(sp + 1));
      if (value.empty()) {
        problems.push_back(strprintf("%s:%d: key '%s' has no value", path.c_str(),
                                     lineno, key.c_str()));
        continue;
      }
      try {
        apply_kv(cfg, key, value);
      } catch (const ConfigError& e) {
        problems.push_back(strprintf("%s:%d: %s", path.c_str(), lineno, e.what()));
      }
    }
    if (!problems.empty()) {
      std::string msg = "config file rejected:";
      for (const std::string& p : problems) msg += "\n  " + p;
      throw ConfigError(msg);
    }
  }

  for (const std::string& ov : overrides) {
    size_t eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override must look like key=value, got '" + ov + "'");
    }
    apply_kv(cfg, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
  }
  return cfg;
}

std::vector<std::string> validate_all(const RunConfig& cfg) {
  std::vector<std::string> errors;
  auto probe = [&](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      errors.push_back(std::string(section) + ": " + e.what());
    }
  };
  probe("model", [&] { cfg.model.validate(); });
  probe("train", [&] { cfg.train.validate(); });
  probe("data", [&] { cfg.data.scene_config().validate(); });
  probe("data", [&] {
    double sum = cfg.data.train_frac + cfg.data.validation_frac + cfg.data.test_frac;
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw ConfigError(strprintf("split fractions must sum to 1, got %.12g", sum));
    }
  });
  return errors;
}

std::string resolved_text(const RunConfig& cfg) {
  // Collect every key in one map so the echo is sorted and complete.
  std::map<std::string, std::string> kv;
  for (const std::string& line : split_on(cfg.model.canonical_text(), '\n')) {
    if (line.empty()) continue;
    std::vector<std::string> tok = split_ws(line);
    kv[tok[0]] = tok.size() > 1 ? tok[1] : "";
  }
  kv["train.epochs"] = std::to_string(cfg.train.epochs);
  kv["train.batch_size"] = std::to_string(cfg.train.batch_size);
  kv["train.lr"] = fmt_full(cfg.train.lr);
  kv["train.lr_decay"] = fmt_full(cfg.train.lr_decay);
  kv["train.lr_decay_every"] = std::to_string(cfg.train.lr_decay_every);
  kv["train.grad_clip"] = fmt_full(cfg.train.grad_clip);
  kv["train.crop_s"] = fmt_full(cfg.train.crop_s);
  kv["train.seed"] = std::to_string(cfg.train.seed);
  kv["train.max_steps"] = std::to_string(cfg.train.max_steps);
  kv["data.dir"] = cfg.data.dir;
  kv["data.fs_audio"] = fmt_full(cfg.data.fs_audio);
  kv["data.fs_eeg"] = fmt_full(cfg.data.fs_eeg);
  kv["data.duration_s"] = fmt_full(cfg.data.duration_s);
  kv["data.eeg_channels"] = std::to_string(cfg.data.eeg_channels);
  kv["data.sir_db"] = fmt_full(cfg.data.sir_db);
  kv["data.eeg_snr_db"] = fmt_full(cfg.data.eeg_snr_db);
  kv["data.train_frac"] = fmt_full(cfg.data.train_frac);
  kv["data.validation_frac"] = fmt_full(cfg.data.validation_frac);
  kv["data.test_frac"] = fmt_full(cfg.data.test_frac);
  kv["run.root"] = cfg.run_root;
  kv["run.name"] = cfg.run_name;

  std::string out;
  for (const auto& [key, value] : kv) {
    if (value.empty()) continue;  // e.g. unset data.dir
    out += key + " " + value + "\n";
  }
  return out;
}

std::vector<data::Scene> load_split(const std::string& dir, const std::string& split,
                                    std::vector<std::string>* ids_out) {
  data::SplitManifest m = data::read_manifest(dir + "/manifest.txt");
  const std::vector<std::string>* ids = nullptr;
  if (split == "train") {
    ids = &m.train;
  } else if (split == "validation") {
    ids = &m.validation;
  } else if (split == "test") {
    ids = &m.test;
  } else {
    throw ConfigError("split must be train, validation, or test; got '" + split + "'");
  }
  std::vector<data::Scene> scenes;
  for (const std::string& id : *ids) {
    scenes.push_back(data::load_scene(dir, id));
  }
  if (ids_out) *ids_out = *ids;
  return scenes;
}

}  // namespace eegsep::cli
