// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "data/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "common/error.h"
#include "common/text.h"

namespace eegsep::data {
namespace {

// All multi-byte fields in RIFF/WAVE are little-endian. The readers below
// assemble values bytewise so the code is endian-agnostic.
uint32_t rd_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t rd_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

void wr_u32(std::vector<unsigned char>& out, uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8 & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 16 & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 24 & 0xff));
}

void wr_u16(std::vector<unsigned char>& out, uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8 & 0xff));
}

void wr_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::vector<unsigned char> read_file(const std::string& path) {
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
  return buf;
}

void write_file(const std::string& path, const std::vector<unsigned char>& buf) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "wb"),
                                                    std::fclose);
  if (!f) throw FormatError("cannot open for write: " + path);
  if (!buf.empty() && std::fwrite(buf.data(), 1, buf.size(), f.get()) != buf.size()) {
    throw FormatError("short write: " + path);
  }
}

constexpr uint16_t kFmtPcm = 1;
constexpr uint16_t kFmtFloat = 3;
constexpr double kPcmScale = 32767.0;

}  // namespace

Wav read_wav(const std::string& path) {
  const std::vector<unsigned char> buf = read_file(path);
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path);
  }

  uint16_t fmt_code = 0, num_channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  size_t data_off = 0, data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const unsigned char* hd = buf.data() + pos;
    uint32_t chunk_len = rd_u32(hd + 4);
    size_t body = pos + 8;
    if (body + chunk_len > buf.size()) {
      throw FormatError(strprintf("truncated chunk at byte %zu in %s", pos, path.c_str()));
    }
    if (std::memcmp(hd, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw FormatError("fmt chunk too small: " + path);
      const unsigned char* p = buf.data() + body;
      fmt_code = rd_u16(p);
      num_channels = rd_u16(p + 2);
      sample_rate = rd_u32(p + 4);
      bits = rd_u16(p + 14);
      have_fmt = true;
    } else if (std::memcmp(hd, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }
  if (!have_fmt) throw FormatError("missing fmt chunk: " + path);
  if (data_off == 0) throw FormatError("missing data chunk: " + path);
  if (num_channels < 1 || num_channels > 2) {
    throw FormatError(strprintf("unsupported channel count %u: %s", num_channels,
                                path.c_str()));
  }
  if (sample_rate == 0) throw FormatError("zero sample rate: " + path);

  size_t bytes_per_sample;
  if (fmt_code == kFmtPcm && bits == 16) {
    bytes_per_sample = 2;
  } else if (fmt_code == kFmtFloat && bits == 32) {
    bytes_per_sample = 4;
  } else {
    throw FormatError(strprintf("unsupported encoding (format %u, %u bit): %s",
                                fmt_code, bits, path.c_str()));
  }
  size_t frame_bytes = bytes_per_sample * num_channels;
  if (data_len % frame_bytes != 0) {
    throw FormatError(strprintf("data chunk size %zu is not a whole number of frames: %s",
                                data_len, path.c_str()));
  }
  size_t frames = data_len / frame_bytes;

  Wav wav;
  wav.sample_rate = static_cast<double>(sample_rate);
  wav.channels.assign(num_channels, std::vector<double>(frames));
  const unsigned char* p = buf.data() + data_off;
  for (size_t i = 0; i < frames; ++i) {
    for (uint16_t c = 0; c < num_channels; ++c) {
      if (bytes_per_sample == 2) {
        int16_t q = static_cast<int16_t>(rd_u16(p));
        wav.channels[c][i] = static_cast<double>(q) / kPcmScale;
        p += 2;
      } else {
        uint32_t u = rd_u32(p);
        float v;
        std::memcpy(&v, &u, 4);
        wav.channels[c][i] = static_cast<double>(v);
        p += 4;
      }
    }
  }
  return wav;
}

void write_wav(const std::string& path, const Wav& wav, WavEncoding enc) {
  size_t num_channels = wav.channels.size();
  if (num_channels < 1 || num_channels > 2) {
    throw DimError(strprintf("wav must have 1 or 2 channels, got %zu", num_channels));
  }
  size_t frames = wav.channels[0].size();
  for (const auto& ch : wav.channels) {
    if (ch.size() != frames) throw DimError("wav channel lengths differ");
  }
  if (!(wav.sample_rate > 0)) throw ConfigError("wav sample rate must be positive");

  const bool pcm = enc == WavEncoding::kPcm16;
  const uint16_t bits = pcm ? 16 : 32;
  const uint32_t rate = static_cast<uint32_t>(std::llround(wav.sample_rate));
  const uint16_t block = static_cast<uint16_t>(bits / 8 * num_channels);
  const uint32_t data_len = static_cast<uint32_t>(frames * block);

  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  wr_tag(out, "RIFF");
  wr_u32(out, 36 + data_len);
  wr_tag(out, "WAVE");
  wr_tag(out, "fmt ");
  wr_u32(out, 16);
  wr_u16(out, pcm ? kFmtPcm : kFmtFloat);
  wr_u16(out, static_cast<uint16_t>(num_channels));
  wr_u32(out, rate);
  wr_u32(out, rate * block);
  wr_u16(out, block);
  wr_u16(out, bits);
  wr_tag(out, "data");
  wr_u32(out, data_len);
  for (size_t i = 0; i < frames; ++i) {
    for (size_t c = 0; c < num_channels; ++c) {
      double v = wav.channels[c][i];
      if (pcm) {
        double clamped = std::clamp(v, -1.0, 1.0);
        wr_u16(out, static_cast<uint16_t>(
                        static_cast<int16_t>(std::llround(clamped * kPcmScale))));
      } else {
        float f = static_cast<float>(v);
        uint32_t u;
        std::memcpy(&u, &f, 4);
        wr_u32(out, u);
      }
    }
  }
  write_file(path, out);
}

}  // namespace eegsep::data
