// dar/spectral.h

// Copyright 2026  The dar authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DAR_SPECTRAL_H_
#define DAR_SPECTRAL_H_

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "dar/ingest.h"

namespace dar {

struct SpectralOptions {
  /// Hann taper before the transform. Off by default.
  bool hann = false;
  /// log(magnitude + log_floor) instead of magnitude.
  bool log_magnitude = false;
  double log_floor = 1e-6;
};

/// Magnitudes of one window: [x spectrum | y spectrum | z spectrum], each
/// n/2+1 bins long.
struct SpectralFeature {
  Eigen::VectorXd values;
  int n = 0;
  int label = kUnlabeled;
  WindowOrigin origin;
};

/// Feature length for window length n: 3(n/2 + 1).
int feature_length(int n);

/// One-sided magnitude spectrum, |sum_j s_j exp(-2 pi i jk/N)| / N for
/// k = 0..N/2. Any even N >= 2 is accepted.
std::vector<double> dft_magnitude(std::span<const double> signal);

/// Reusable transform for a fixed window length; holds the twiddle table so
/// repeated calls avoid recomputing sines and cosines.
class MagnitudeSpectrum {
 public:
  explicit MagnitudeSpectrum(int n, SpectralOptions options = {});

  int size() const { return n_; }
  int bins() const { return n_ / 2 + 1; }

  /// Writes bins() values to `out`.
  void compute(std::span<const double> signal, std::span<double> out) const;

 private:
  int n_;
  SpectralOptions options_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::vector<double> taper_;
};

SpectralFeature spectral_feature(const WindowFrame& window,
                                 const SpectralOptions& options = {});

std::vector<SpectralFeature> spectral_features(
    const std::vector<WindowFrame>& windows,
    const SpectralOptions& options = {});

}  // namespace dar

#endif  // DAR_SPECTRAL_H_
