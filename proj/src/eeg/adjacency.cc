// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "eeg/adjacency.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common/error.h"
#include "common/rng.h"
#include "common/text.h"

namespace eegsep::eeg {

std::vector<Electrode> parse_montage(const std::string& text) {
  std::vector<Electrode> out;
  size_t line_no = 0;
  for (const std::string& raw : split_on(text, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> tok = split_ws(line);
    if (tok.size() != 4) {
      throw FormatError("montage line " + std::to_string(line_no) +
                        ": expected 'name x y z', got '" + line + "'");
    }
    Electrode e;
    e.name = tok[0];
    try {
      size_t used = 0;
      e.x = std::stod(tok[1], &used);
      if (used != tok[1].size()) throw std::invalid_argument(tok[1]);
      e.y = std::stod(tok[2], &used);
      if (used != tok[2].size()) throw std::invalid_argument(tok[2]);
      e.z = std::stod(tok[3], &used);
      if (used != tok[3].size()) throw std::invalid_argument(tok[3]);
    } catch (const std::exception&) {
      throw FormatError("montage line " + std::to_string(line_no) +
                        ": non-numeric coordinate in '" + line + "'");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Electrode> load_montage(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open montage file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_montage(ss.str());
}

nn::Tensor<double> default_adjacency(int64_t channels) {
  if (channels < 1) throw ConfigError("adjacency needs >= 1 channel");
  nn::Tensor<double> a({channels, channels});
  const double coupling = 1.0 / static_cast<double>(channels);
  for (int64_t i = 0; i < channels; ++i) {
    for (int64_t j = 0; j < channels; ++j) {
      a.at(i, j) = coupling + (i == j ? 1.0 : 0.0);
    }
  }
  return a;
}

nn::Tensor<double> montage_adjacency(const std::vector<Electrode>& electrodes) {
  const int64_t c = static_cast<int64_t>(electrodes.size());
  if (c < 2) throw ConfigError("montage adjacency needs >= 2 electrodes");
  // Pairwise squared distances; kernel width = median distance.
  nn::Tensor<double> d2({c, c});
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(c * (c - 1) / 2));
  for (int64_t i = 0; i < c; ++i) {
    for (int64_t j = i + 1; j < c; ++j) {
      const Electrode& a = electrodes[static_cast<size_t>(i)];
      const Electrode& b = electrodes[static_cast<size_t>(j)];
      double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
      double sq = dx * dx + dy * dy + dz * dz;
      d2.at(i, j) = sq;
      d2.at(j, i) = sq;
      dists.push_back(std::sqrt(sq));
    }
  }
  std::sort(dists.begin(), dists.end());
  double sigma = dists.size() % 2 == 1
                     ? dists[dists.size() / 2]
                     : 0.5 * (dists[dists.size() / 2 - 1] + dists[dists.size() / 2]);
  if (sigma <= 0.0) {
    throw ConfigError("montage adjacency: electrodes are co-located (median "
                      "inter-electrode distance is zero)");
  }
  nn::Tensor<double> a({c, c});
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int64_t i = 0; i < c; ++i) {
    a.at(i, i) = 1.0;
    for (int64_t j = i + 1; j < c; ++j) {
      double w = std::exp(-d2.at(i, j) * inv);
      a.at(i, j) = w;
      a.at(j, i) = w;  // mirrored, so symmetry is bitwise
    }
  }
  return a;
}

nn::Tensor<double> normalized_adjacency(nn::Tensor<double> a) {
  if (a.rank() != 2 || a.dim(0) != a.dim(1)) {
    throw DimError("adjacency must be square, got " + nn::shape_str(a.shape()));
  }
  const int64_t c = a.dim(0);
  double amax = 0.0;
  for (int64_t i = 0; i < c * c; ++i) amax = std::max(amax, std::abs(a[i]));
  const double sym_tol = 1e-12 * std::max(1.0, amax);
  for (int64_t i = 0; i < c; ++i) {
    for (int64_t j = 0; j < c; ++j) {
      if (a.at(i, j) < 0.0) {
        throw ConfigError("adjacency has a negative entry at (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (j > i && std::abs(a.at(i, j) - a.at(j, i)) > sym_tol) {
        throw ConfigError("adjacency is not symmetric at (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  // Unit self-loop for isolated nodes, then symmetric degree normalization.
  std::vector<double> deg(static_cast<size_t>(c), 0.0);
  for (int64_t i = 0; i < c; ++i) {
    double s = 0.0;
    for (int64_t j = 0; j < c; ++j) s += a.at(i, j);
    if (s == 0.0) {
      a.at(i, i) = 1.0;
      s = 1.0;
    }
    deg[static_cast<size_t>(i)] = s;
  }
  std::vector<double> dinv(static_cast<size_t>(c));
  for (int64_t i = 0; i < c; ++i)
    dinv[static_cast<size_t>(i)] = 1.0 / std::sqrt(deg[static_cast<size_t>(i)]);
  nn::Tensor<double> out({c, c});
  for (int64_t i = 0; i < c; ++i) {
    for (int64_t j = 0; j < c; ++j) {
      out.at(i, j) =
          a.at(i, j) * dinv[static_cast<size_t>(i)] * dinv[static_cast<size_t>(j)];
    }
  }
  return out;
}

double spectral_radius_sym(const nn::Tensor<double>& m, int iters,
                           uint64_t seed) {
  if (m.rank() != 2 || m.dim(0) != m.dim(1)) {
    throw DimError("spectral_radius_sym: square matrix required");
  }
  const int64_t c = m.dim(0);
  Rng rng(seed);
  std::vector<double> v(static_cast<size_t>(c));
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  std::vector<double> w(static_cast<size_t>(c));
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    for (int64_t i = 0; i < c; ++i) {
      double s = 0.0;
      for (int64_t j = 0; j < c; ++j)
        s += m.at(i, j) * v[static_cast<size_t>(j)];
      w[static_cast<size_t>(i)] = s;
    }
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (int64_t i = 0; i < c; ++i) v[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] / norm;
    lambda = norm;
  }
  return lambda;
}

}  // namespace eegsep::eeg
