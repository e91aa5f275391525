// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_DATA_SPLITS_H_
#define EEGSEP_DATA_SPLITS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace eegsep::data {

struct SplitManifest {
  std::vector<std::string> train, validation, test;

  int64_t total() const {
    return static_cast<int64_t>(train.size() + validation.size() + test.size());
  }
};

// Seeded shuffle followed by contiguous assignment, so the three lists are
// disjoint and cover every id. Counts are the rounded fractions; any split
// with a positive fraction is guaranteed at least one id. Fractions must be
// nonnegative and sum to 1 (1e-9); fewer ids than positive fractions is a
// ConfigError.
SplitManifest make_splits(const std::vector<std::string>& ids, double train_frac,
                          double validation_frac, double test_frac, uint64_t seed);

// Plain-text form, one "split id" pair per line. Unknown split labels raise
// FormatError on read.
void write_manifest(const std::string& path, const SplitManifest& m);
SplitManifest read_manifest(const std::string& path);

}  // namespace eegsep::data

#endif  // EEGSEP_DATA_SPLITS_H_
