// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "data/splits.h"

#include <cmath>
#include <cstdio>
#include <memory>
#include <utility>

#include "common/error.h"
#include "common/rng.h"
#include "common/text.h"

namespace eegsep::data {

SplitManifest make_splits(const std::vector<std::string>& ids, double train_frac,
                          double validation_frac, double test_frac, uint64_t seed) {
  const double fracs[3] = {train_frac, validation_frac, test_frac};
  double sum = 0.0;
  int positive = 0;
  for (double f : fracs) {
    if (f < 0.0 || !std::isfinite(f)) throw ConfigError("split fractions must be >= 0");
    sum += f;
    if (f > 0.0) ++positive;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw ConfigError(strprintf("split fractions must sum to 1, got %.12g", sum));
  }
  int64_t n = static_cast<int64_t>(ids.size());
  if (n < positive) {
    throw ConfigError(strprintf("%lld scenes cannot fill %d splits",
                                static_cast<long long>(n), positive));
  }

  std::vector<std::string> order = ids;
  Rng rng(seed);
  for (int64_t i = n - 1; i > 0; --i) {  // Fisher-Yates with the project Rng
    int64_t j = static_cast<int64_t>(rng.index(static_cast<uint64_t>(i + 1)));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }

  int64_t counts[3];
  counts[0] = static_cast<int64_t>(std::llround(static_cast<double>(n) * fracs[0]));
  counts[1] = static_cast<int64_t>(std::llround(static_cast<double>(n) * fracs[1]));
  if (counts[0] > n) counts[0] = n;
  if (counts[0] + counts[1] > n) counts[1] = n - counts[0];
  counts[2] = n - counts[0] - counts[1];
  // Rounding can starve a split whose fraction is positive; borrow from the
  // largest one so every requested split is nonempty.
  for (int k = 0; k < 3; ++k) {
    if (fracs[k] > 0.0 && counts[k] == 0) {
      int big = 0;
      for (int j = 1; j < 3; ++j) {
        if (counts[j] > counts[big]) big = j;
      }
      --counts[big];
      ++counts[k];
    }
  }

  SplitManifest m;
  size_t pos = 0;
  std::vector<std::string>* lists[3] = {&m.train, &m.validation, &m.test};
  for (int k = 0; k < 3; ++k) {
    for (int64_t i = 0; i < counts[k]; ++i) lists[k]->push_back(order[pos++]);
  }
  return m;
}

void write_manifest(const std::string& path, const SplitManifest& m) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "wb"),
                                                    std::fclose);
  if (!f) throw FormatError("cannot open for write: " + path);
  auto emit = [&](const char* label, const std::vector<std::string>& list) {
    for (const auto& id : list) {
      std::string line = std::string(label) + " " + id + "\n";
      std::fwrite(line.data(), 1, line.size(), f.get());
    }
  };
  emit("train", m.train);
  emit("validation", m.validation);
  emit("test", m.test);
}

SplitManifest read_manifest(const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "rb"),
                                                    std::fclose);
  if (!f) throw FormatError("cannot open for read: " + path);
  std::string text;
  char buf[4096];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f.get())) > 0) text.append(buf, got);

  SplitManifest m;
  for (const std::string& line : split_on(text, '\n')) {
    std::vector<std::string> tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw FormatError("malformed manifest line: " + line);
    if (tok[0] == "train") {
      m.train.push_back(tok[1]);
    } else if (tok[0] == "validation") {
      m.validation.push_back(tok[1]);
    } else if (tok[0] == "test") {
      m.test.push_back(tok[1]);
    } else {
      throw FormatError("unknown split label: " + tok[0]);
    }
  }
  return m;
}

}  // namespace eegsep::data
