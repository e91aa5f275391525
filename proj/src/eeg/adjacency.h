// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Electrode-graph construction: default and montage-derived adjacencies plus
// the symmetric degree normalization D^{-1/2} A D^{-1/2} used by the graph
// layers. All eigenvalues of the normalized operator lie in [-1, 1], so its
// spectral radius never exceeds 1.

#ifndef EEGSEP_EEG_ADJACENCY_H_
#define EEGSEP_EEG_ADJACENCY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "nn/tensor.h"

namespace eegsep {
namespace eeg {

// One electrode: label plus 3-D position (any consistent unit).
struct Electrode {
  std::string name;
  double x = 0, y = 0, z = 0;
};

// Parse montage text, one electrode per line: "name x y z". Blank lines and
// lines starting with '#' are skipped. Throws FormatError on malformed lines.
std::vector<Electrode> parse_montage(const std::string& text);

// Load a montage file from disk (thin wrapper over parse_montage).
std::vector<Electrode> load_montage(const std::string& path);

// Default electrode graph when no montage is given: self-loops plus uniform
// all-to-all coupling, A = I + (1/C) * ones.
nn::Tensor<double> default_adjacency(int64_t channels);

// Gaussian-kernel graph from electrode positions: A_ij = exp(-d_ij^2 / 2s^2)
// with s = median pairwise distance. Requires >= 2 electrodes at >= 2
// distinct positions (otherwise the kernel width degenerates).
nn::Tensor<double> montage_adjacency(const std::vector<Electrode>& electrodes);

// Validate (square, symmetric, nonnegative), add a unit self-loop to any
// zero-degree node, and return D^{-1/2} A D^{-1/2} with D the diagonal of
// row sums. Throws DimError / ConfigError on invalid input.
nn::Tensor<double> normalized_adjacency(nn::Tensor<double> a);

// Largest |eigenvalue| of a symmetric matrix by power iteration.
double spectral_radius_sym(const nn::Tensor<double>& m, int iters = 300,
                           uint64_t seed = 1);

}  // namespace eeg
}  // namespace eegsep

#endif  // EEGSEP_EEG_ADJACENCY_H_
