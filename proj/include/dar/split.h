// dar/split.h

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

#ifndef DAR_SPLIT_H_
#define DAR_SPLIT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dar/ingest.h"

namespace dar {

enum class SplitPolicy { kRandomStratified, kByUser };

SplitPolicy parse_split_policy(const std::string& name);
std::string to_string(SplitPolicy policy);

/// Index form of a split; both lists are sorted ascending.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Splits items described by parallel `labels` and `users` arrays.
///
/// Stratified: every labeled class contributes round(test_fraction * count)
/// items to the test side; unlabeled items always stay in training, where
/// only pretraining reads them. By-user: round(test_fraction * users) users
/// (at least one, at most all but one) are held out entirely.
SplitIndices split_indices(const std::vector<int>& labels,
                           const std::vector<std::string>& users,
                           SplitPolicy policy, double test_fraction,
                           std::uint64_t seed);

struct DatasetSplit {
  std::vector<WindowFrame> train;
  std::vector<WindowFrame> test;
  std::uint64_t seed = 0;
  SplitPolicy policy = SplitPolicy::kRandomStratified;
};

DatasetSplit split_dataset(const std::vector<WindowFrame>& windows,
                           SplitPolicy policy, double test_fraction,
                           std::uint64_t seed);

}  // namespace dar

#endif  // DAR_SPLIT_H_
