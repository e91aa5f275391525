// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EEGSEP_DSP_RESAMPLE_H_
#define EEGSEP_DSP_RESAMPLE_H_

#include <vector>

namespace eegsep::dsp {

// Windowed-sinc rate conversion. Output length = round(len * target/fs).
// The kernel is normalized per output sample, so constants are preserved
// exactly and DC gain is unity even at the edges.
std::vector<double> resample(const std::vector<double>& x, double fs, double target_fs);

}  // namespace eegsep::dsp

#endif  // EEGSEP_DSP_RESAMPLE_H_
