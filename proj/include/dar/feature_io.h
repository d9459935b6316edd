// dar/feature_io.h

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

#ifndef DAR_FEATURE_IO_H_
#define DAR_FEATURE_IO_H_

#include <string>
#include <vector>

#include "dar/spectral.h"

namespace dar {

/// Spectral features of one ingest run plus the class vocabulary.
struct FeatureSet {
  std::vector<std::string> class_labels;
  int n = 0;
  std::vector<SpectralFeature> features;

  int dim() const { return feature_length(n); }
};

// Feature dump layout (text, one window per row):
//
//   #dar-features 1 n=<N> L=<L>
//   #classes <label_0>,<label_1>,...
//   label,user,recording,start,x0,...,x<N/2>,y0,...,y<N/2>,z0,...,z<N/2>
//   <label or "unlabeled">,<user>,<recording>,<start>,<L values>
//
// Values are written in shortest round-trip form, so a dump reloads to
// identical doubles.
void write_features(const std::string& path, const FeatureSet& set);
FeatureSet read_features(const std::string& path);

}  // namespace dar

#endif  // DAR_FEATURE_IO_H_
