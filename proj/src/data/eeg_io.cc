// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "data/eeg_io.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>

#include "common/error.h"
#include "common/text.h"

namespace eegsep::data {
namespace {

constexpr const char* kMagic = "eegsep-eeg 1";
constexpr size_t kAlign = 128;

void wr_f32_le(std::string& out, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  out.push_back(static_cast<char>(u & 0xff));
  out.push_back(static_cast<char>(u >> 8 & 0xff));
  out.push_back(static_cast<char>(u >> 16 & 0xff));
  out.push_back(static_cast<char>(u >> 24 & 0xff));
}

float rd_f32_le(const unsigned char* p) {
  uint32_t u = static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
               static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}

}  // namespace

nn::Tensor<double> EegRecording::to_tensor() const {
  nn::Tensor<double> out({channels(), samples});
  for (int64_t i = 0; i < out.size(); ++i) {
    out.data()[static_cast<size_t>(i)] = static_cast<double>(payload[static_cast<size_t>(i)]);
  }
  return out;
}

EegRecording EegRecording::from_tensor(const nn::Tensor<double>& x, double fs,
                                       std::vector<std::string> names) {
  if (x.rank() != 2) throw DimError("eeg tensor must be (channels, samples)");
  if (static_cast<int64_t>(names.size()) != x.shape()[0]) {
    throw DimError(strprintf("got %zu channel names for %lld channels", names.size(),
                             static_cast<long long>(x.shape()[0])));
  }
  EegRecording rec;
  rec.fs = fs;
  rec.channel_names = std::move(names);
  rec.samples = x.shape()[1];
  rec.payload.resize(static_cast<size_t>(x.size()));
  for (int64_t i = 0; i < x.size(); ++i) {
    rec.payload[static_cast<size_t>(i)] = static_cast<float>(x.data()[static_cast<size_t>(i)]);
  }
  return rec;
}

void write_eeg(const std::string& path, const EegRecording& rec) {
  if (rec.channel_names.empty()) throw FormatError("eeg record has no channels");
  if (rec.samples < 0) throw FormatError("negative sample count");
  if (!(rec.fs > 0)) throw FormatError("eeg sampling rate must be positive");
  if (rec.payload.size() !=
      static_cast<size_t>(rec.channels()) * static_cast<size_t>(rec.samples)) {
    throw FormatError(strprintf("payload holds %zu values, header implies %lld",
                                rec.payload.size(),
                                static_cast<long long>(rec.channels() * rec.samples)));
  }
  for (const auto& n : rec.channel_names) {
    if (n.empty() || n.find_first_of(" \t\r\n") != std::string::npos) {
      throw FormatError("channel names must be non-empty and whitespace-free");
    }
  }

  std::string header;
  header += kMagic;
  header += '\n';
  header += "fs " + fmt_full(rec.fs) + '\n';
  header += strprintf("channels %lld\n", static_cast<long long>(rec.channels()));
  header += strprintf("samples %lld\n", static_cast<long long>(rec.samples));
  for (const auto& n : rec.channel_names) header += "name " + n + '\n';
  header += "end\n";
  while (header.size() % kAlign != 0) header += '\n';  // payload starts aligned

  std::string body = header;
  body.reserve(header.size() + rec.payload.size() * 4);
  for (float v : rec.payload) wr_f32_le(body, v);

  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "wb"),
                                                    std::fclose);
  if (!f) throw FormatError("cannot open for write: " + path);
  if (std::fwrite(body.data(), 1, body.size(), f.get()) != body.size()) {
    throw FormatError("short write: " + path);
  }
}

EegRecording read_eeg(const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "rb"),
                                                    std::fclose);
  if (!f) throw FormatError("cannot open for read: " + path);
  std::fseek(f.get(), 0, SEEK_END);
  long n = std::ftell(f.get());
  std::fseek(f.get(), 0, SEEK_SET);
  if (n < 0) throw FormatError("cannot stat: " + path);
  std::vector<unsigned char> buf(static_cast<size_t>(n));
  if (n > 0 && std::fread(buf.data(), 1, buf.size(), f.get()) != buf.size()) {
    throw FormatError("short read: " + path);
  }

  // The header is everything up to and including the "end" line; the payload
  // begins at the next 128-byte boundary at or after it.
  size_t pos = 0;
  EegRecording rec;
  int64_t declared_channels = -1;
  bool saw_magic = false, saw_end = false;
  size_t end_pos = 0;
  while (pos < buf.size()) {
    size_t eol = pos;
    while (eol < buf.size() && buf[eol] != '\n') ++eol;
    if (eol == buf.size()) break;  // header lines are newline-terminated
    std::string line(reinterpret_cast<const char*>(buf.data() + pos), eol - pos);
    pos = eol + 1;
    if (!saw_magic) {
      if (line != kMagic) throw FormatError("bad magic line: " + path);
      saw_magic = true;
      continue;
    }
    if (line == "end") {
      saw_end = true;
      end_pos = pos;
      break;
    }
    std::vector<std::string> tok = split_ws(line);
    if (tok.size() != 2) throw FormatError("malformed header line '" + line + "': " + path);
    if (tok[0] == "fs") {
      try {
        rec.fs = std::stod(tok[1]);
      } catch (const std::exception&) {
        throw FormatError("bad fs value '" + tok[1] + "': " + path);
      }
    } else if (tok[0] == "channels") {
      declared_channels = std::strtoll(tok[1].c_str(), nullptr, 10);
    } else if (tok[0] == "samples") {
      rec.samples = std::strtoll(tok[1].c_str(), nullptr, 10);
    } else if (tok[0] == "name") {
      rec.channel_names.push_back(tok[1]);
    } else {
      throw FormatError("unknown header field '" + tok[0] + "': " + path);
    }
  }
  if (!saw_magic) throw FormatError("bad magic line: " + path);
  if (!saw_end) throw FormatError("missing end-of-header marker: " + path);
  if (!(rec.fs > 0)) throw FormatError("missing or invalid fs: " + path);
  if (declared_channels < 1) throw FormatError("missing or invalid channel count: " + path);
  if (rec.samples < 0) throw FormatError("missing or invalid sample count: " + path);
  if (declared_channels != rec.channels()) {
    throw FormatError(strprintf("header declares %lld channels but lists %lld names: %s",
                                static_cast<long long>(declared_channels),
                                static_cast<long long>(rec.channels()), path.c_str()));
  }

  size_t payload_off = (end_pos + kAlign - 1) / kAlign * kAlign;
  size_t expect = static_cast<size_t>(rec.channels()) * static_cast<size_t>(rec.samples) * 4;
  if (payload_off > buf.size() || buf.size() - payload_off != expect) {
    throw FormatError(strprintf(
        "payload is %zu bytes, header implies %zu: %s",
        payload_off > buf.size() ? size_t{0} : buf.size() - payload_off, expect,
        path.c_str()));
  }
  rec.payload.resize(expect / 4);
  for (size_t i = 0; i < rec.payload.size(); ++i) {
    rec.payload[i] = rd_f32_le(buf.data() + payload_off + i * 4);
  }
  return rec;
}

}  // namespace eegsep::data
