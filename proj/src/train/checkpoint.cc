// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "train/checkpoint.h"

#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "common/error.h"
#include "common/rng.h"
#include "common/text.h"

namespace eegsep::train {
namespace {

constexpr const char* kMagic = "eegsep-checkpoint 1";
constexpr size_t kAlign = 128;

std::string shape_text(const nn::Shape& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(s[i]);
  }
  return out.empty() ? "1" : out;
}

nn::Shape parse_shape(const std::string& text) {
  nn::Shape s;
  for (const std::string& part : split_on(text, 'x')) {
    char* end = nullptr;
    long long v = std::strtoll(part.c_str(), &end, 10);
    if (end == part.c_str() || *end != '\0' || v < 1) {
      throw FormatError("bad tensor shape '" + text + "'");
    }
    s.push_back(static_cast<int64_t>(v));
  }
  return s;
}

void append_f32(std::string& out, const nn::Tensor<double>& t) {
  for (int64_t i = 0; i < t.size(); ++i) {
    float f = static_cast<float>(t.data()[static_cast<size_t>(i)]);
    uint32_t u;
    std::memcpy(&u, &f, 4);
    out.push_back(static_cast<char>(u & 0xff));
    out.push_back(static_cast<char>(u >> 8 & 0xff));
    out.push_back(static_cast<char>(u >> 16 & 0xff));
    out.push_back(static_cast<char>(u >> 24 & 0xff));
  }
}

// Tensor sections appear in this fixed order; within each section the map
// iteration order (sorted by name) makes the layout canonical.
const char* const kSections[4] = {"param", "buffer", "adam_m", "adam_v"};

}  // namespace

Checkpoint snapshot(const ModelConfig& cfg, const nn::ParamRegistry<double>& reg,
                    const Adam* adam, int64_t epoch) {
  Checkpoint ckpt;
  for (const std::string& line : split_on(cfg.canonical_text(), '\n')) {
    if (line.empty()) continue;
    std::vector<std::string> tok = split_ws(line);
    ckpt.config[tok[0]] = tok.size() > 1 ? tok[1] : "";
  }
  ckpt.config_hash = cfg.hash();
  ckpt.epoch = epoch;
  ckpt.params = reg.params();
  ckpt.buffers = reg.buffers();
  if (adam) {
    ckpt.adam_steps = adam->steps();
    ckpt.adam_m = adam->moments_m();
    ckpt.adam_v = adam->moments_v();
  }
  return ckpt;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::string header;
  header += kMagic;
  header += '\n';
  header += strprintf("config_hash %016llx\n",
                      static_cast<unsigned long long>(ckpt.config_hash));
  header += strprintf("epoch %lld\n", static_cast<long long>(ckpt.epoch));
  header += strprintf("adam_steps %lld\n", static_cast<long long>(ckpt.adam_steps));
  for (const auto& [key, value] : ckpt.config) {
    header += "cfg " + key + " " + value + "\n";
  }
  const std::map<std::string, nn::Tensor<double>>* sections[4] = {
      &ckpt.params, &ckpt.buffers, &ckpt.adam_m, &ckpt.adam_v};
  for (int s = 0; s < 4; ++s) {
    for (const auto& [name, t] : *sections[s]) {
      header += std::string(kSections[s]) + " " + name + " " + shape_text(t.shape()) +
                "\n";
    }
  }
  header += "end\n";
  while (header.size() % kAlign != 0) header += '\n';

  std::string body = header;
  for (int s = 0; s < 4; ++s) {
    for (const auto& [name, t] : *sections[s]) append_f32(body, t);
  }

  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "wb"),
                                                    std::fclose);
  if (!f) throw FormatError("cannot open for write: " + path);
  if (std::fwrite(body.data(), 1, body.size(), f.get()) != body.size()) {
    throw FormatError("short write: " + path);
  }
}

Checkpoint read_checkpoint(const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "rb"),
                                                    std::fclose);
  if (!f) throw FormatError("cannot open for read: " + path);
  std::fseek(f.get(), 0, SEEK_END);
  long n = std::ftell(f.get());
  std::fseek(f.get(), 0, SEEK_SET);
  std::vector<unsigned char> buf(static_cast<size_t>(n < 0 ? 0 : n));
  if (!buf.empty() && std::fread(buf.data(), 1, buf.size(), f.get()) != buf.size()) {
    throw FormatError("short read: " + path);
  }

  Checkpoint ckpt;
  struct Entry {
    int section;
    std::string name;
    nn::Shape shape;
  };
  std::vector<Entry> entries;
  bool saw_magic = false, saw_end = false;
  size_t pos = 0, end_pos = 0;
  while (pos < buf.size()) {
    size_t eol = pos;
    while (eol < buf.size() && buf[eol] != '\n') ++eol;
    if (eol == buf.size()) break;
    std::string line(reinterpret_cast<const char*>(buf.data() + pos), eol - pos);
    pos = eol + 1;
    if (!saw_magic) {
      if (line != kMagic) throw FormatError("not a checkpoint file: " + path);
      saw_magic = true;
      continue;
    }
    if (line == "end") {
      saw_end = true;
      end_pos = pos;
      break;
    }
    std::vector<std::string> tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "config_hash" && tok.size() == 2) {
      ckpt.config_hash = std::strtoull(tok[1].c_str(), nullptr, 16);
    } else if (tok[0] == "epoch" && tok.size() == 2) {
      ckpt.epoch = std::strtoll(tok[1].c_str(), nullptr, 10);
    } else if (tok[0] == "adam_steps" && tok.size() == 2) {
      ckpt.adam_steps = std::strtoll(tok[1].c_str(), nullptr, 10);
    } else if (tok[0] == "cfg" && tok.size() == 3) {
      ckpt.config[tok[1]] = tok[2];
    } else if (tok.size() == 3) {
      int section = -1;
      for (int s = 0; s < 4; ++s) {
        if (tok[0] == kSections[s]) section = s;
      }
      if (section < 0) throw FormatError("unknown checkpoint section: " + tok[0]);
      entries.push_back({section, tok[1], parse_shape(tok[2])});
    } else {
      throw FormatError("malformed checkpoint header line: " + line);
    }
  }
  if (!saw_end) throw FormatError("missing end-of-header marker: " + path);

  // Tamper check: the stored hash must match the stored config text.
  ModelConfig cfg = model_config_from(ckpt.config);
  if (cfg.hash() != ckpt.config_hash) {
    throw FormatError("checkpoint config hash does not match its config block: " +
                      path);
  }

  size_t payload_off = (end_pos + kAlign - 1) / kAlign * kAlign;
  size_t expect = 0;
  for (const Entry& e : entries) expect += static_cast<size_t>(nn::numel(e.shape)) * 4;
  if (payload_off > buf.size() || buf.size() - payload_off != expect) {
    throw FormatError(strprintf("checkpoint payload is %zu bytes, header implies %zu: %s",
                                payload_off > buf.size() ? size_t{0}
                                                         : buf.size() - payload_off,
                                expect, path.c_str()));
  }

  size_t off = payload_off;
  for (const Entry& e : entries) {
    nn::Tensor<double> t(e.shape);
    for (int64_t i = 0; i < t.size(); ++i) {
      uint32_t u = static_cast<uint32_t>(buf[off]) |
                   static_cast<uint32_t>(buf[off + 1]) << 8 |
                   static_cast<uint32_t>(buf[off + 2]) << 16 |
                   static_cast<uint32_t>(buf[off + 3]) << 24;
      float v;
      std::memcpy(&v, &u, 4);
      t.data()[static_cast<size_t>(i)] = static_cast<double>(v);
      off += 4;
    }
    std::map<std::string, nn::Tensor<double>>* dst[4] = {&ckpt.params, &ckpt.buffers,
                                                         &ckpt.adam_m, &ckpt.adam_v};
    (*dst[e.section])[e.name] = std::move(t);
  }
  return ckpt;
}

void apply_checkpoint(const Checkpoint& ckpt, nn::ParamRegistry<double>* reg,
                      Adam* adam) {
  for (const auto& [name, t] : ckpt.params) {
    nn::Tensor<double>& dst = reg->param_const(name, t.shape(), 0.0);
    std::memcpy(dst.data(), t.data(), static_cast<size_t>(t.size()) * sizeof(double));
  }
  for (const auto& [name, t] : ckpt.buffers) {
    nn::Tensor<double>& dst = reg->buffer(name, t.shape(), 0.0);
    std::memcpy(dst.data(), t.data(), static_cast<size_t>(t.size()) * sizeof(double));
  }
  if (adam) adam->restore(ckpt.adam_m, ckpt.adam_v, ckpt.adam_steps);
}

ModelConfig config_from_checkpoint(const Checkpoint& ckpt) {
  return model_config_from(ckpt.config);
}

}  // namespace eegsep::train
