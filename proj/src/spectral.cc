// spectral.cc

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

#include "dar/spectral.h"

#include <cmath>
#include <numbers>

#include "dar/error.h"

namespace dar {

int feature_length(int n) {
  if (n < 2 || n % 2 != 0) {
    throw ConfigError("window length must be even and >= 2, got " +
                      std::to_string(n));
  }
  return 3 * (n / 2 + 1);
}

MagnitudeSpectrum::MagnitudeSpectrum(int n, SpectralOptions options)
    : n_(n), options_(options) {
  if (n < 2 || n % 2 != 0) {
    throw ConfigError("DFT length must be even and >= 2, got " +
                      std::to_string(n));
  }
  // exp(-2 pi i m / N) for m = 0..N-1; bin k uses index (j*k) mod N.
  cos_.resize(n);
  sin_.resize(n);
  for (int m = 0; m < n; ++m) {
    const double angle = 2.0 * std::numbers::pi * m / n;
    cos_[m] = std::cos(angle);
    sin_[m] = -std::sin(angle);
  }
  if (options_.hann) {
    taper_.resize(n);
    for (int j = 0; j < n; ++j) {
      taper_[j] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * j / n);
    }
  }
}

void MagnitudeSpectrum::compute(std::span<const double> signal,
                                std::span<double> out) const {
  if (static_cast<int>(signal.size()) != n_) {
    throw DimensionError("DFT input has length " +
                         std::to_string(signal.size()) + ", expected " +
                         std::to_string(n_));
  }
  if (static_cast<int>(out.size()) != bins()) {
    throw DimensionError("DFT output buffer has wrong length");
  }
  std::vector<double> tapered;
  std::span<const double> s = signal;
  for (double v : signal) {
    if (!std::isfinite(v)) throw InputError("DFT input contains non-finite value");
  }
  if (options_.hann) {
    tapered.resize(n_);
    for (int j = 0; j < n_; ++j) tapered[j] = signal[j] * taper_[j];
    s = tapered;
  }
  const double inv_n = 1.0 / n_;
  for (int k = 0; k < bins(); ++k) {
    double re = 0.0;
    double im = 0.0;
    int m = 0;
    for (int j = 0; j < n_; ++j) {
      re += s[j] * cos_[m];
      im += s[j] * sin_[m];
      m += k;
      if (m >= n_) m -= n_;
    }
    double mag = std::hypot(re, im) * inv_n;
    if (options_.log_magnitude) mag = std::log(mag + options_.log_floor);
    out[k] = mag;
  }
}

std::vector<double> dft_magnitude(std::span<const double> signal) {
  const int n = static_cast<int>(signal.size());
  if (n < 2 || n % 2 != 0) {
    throw ConfigError("DFT length must be even and >= 2, got " +
                      std::to_string(n));
  }
  MagnitudeSpectrum spectrum(n);
  std::vector<double> out(spectrum.bins());
  spectrum.compute(signal, out);
  return out;
}

namespace {

SpectralFeature transform(const MagnitudeSpectrum& spectrum,
                          const WindowFrame& window) {
  const int n = spectrum.size();
  if (static_cast<int>(window.x.size()) != n ||
      static_cast<int>(window.y.size()) != n ||
      static_cast<int>(window.z.size()) != n) {
    throw DimensionError("window axes must all have length " + std::to_string(n));
  }
  const int bins = spectrum.bins();
  SpectralFeature feature;
  feature.values.resize(3 * bins);
  feature.n = n;
  feature.label = window.label;
  feature.origin = window.origin;
  double* data = feature.values.data();
  spectrum.compute(window.x, std::span(data, bins));
  spectrum.compute(window.y, std::span(data + bins, bins));
  spectrum.compute(window.z, std::span(data + 2 * bins, bins));
  return feature;
}

}  // namespace

SpectralFeature spectral_feature(const WindowFrame& window,
                                 const SpectralOptions& options) {
  const MagnitudeSpectrum spectrum(static_cast<int>(window.x.size()), options);
  return transform(spectrum, window);
}

std::vector<SpectralFeature> spectral_features(
    const std::vector<WindowFrame>& windows, const SpectralOptions& options) {
  std::vector<SpectralFeature> out;
  if (windows.empty()) return out;
  const MagnitudeSpectrum spectrum(static_cast<int>(windows.front().size()),
                                   options);
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(transform(spectrum, w));
  return out;
}

}  // namespace dar
