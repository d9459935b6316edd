// split.cc

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

#include "dar/split.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dar/error.h"
#include "dar/random.h"

namespace dar {

SplitPolicy parse_split_policy(const std::string& name) {
  if (name == "random-stratified") return SplitPolicy::kRandomStratified;
  if (name == "by-user") return SplitPolicy::kByUser;
  throw ConfigError("unknown split policy '" + name +
                    "' (expected random-stratified or by-user)");
}

std::string to_string(SplitPolicy policy) {
  return policy == SplitPolicy::kByUser ? "by-user" : "random-stratified";
}

SplitIndices split_indices(const std::vector<int>& labels,
                           const std::vector<std::string>& users,
                           SplitPolicy policy, double test_fraction,
                           std::uint64_t seed) {
  if (labels.size() != users.size()) {
    throw DimensionError("split: labels and users differ in length");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  std::vector<bool> in_test(labels.size(), false);

  if (policy == SplitPolicy::kRandomStratified) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != kUnlabeled) by_class[labels[i]].push_back(i);
    }
    for (auto& [label, members] : by_class) {
      if (members.size() < 2) {
        throw ConfigError("stratified split: class " + std::to_string(label) +
                          " has fewer than 2 windows");
      }
      rng.shuffle(std::span(members));
      const auto take = static_cast<std::size_t>(
          std::lround(test_fraction * static_cast<double>(members.size())));
      for (std::size_t k = 0; k < take; ++k) in_test[members[k]] = true;
    }
  } else {
    std::set<std::string> distinct(users.begin(), users.end());
    if (distinct.size() < 2) {
      throw ConfigError("by-user split needs at least 2 users");
    }
    std::vector<std::string> order(distinct.begin(), distinct.end());
    rng.shuffle(std::span(order));
    auto take = static_cast<std::size_t>(
        std::lround(test_fraction * static_cast<double>(order.size())));
    take = std::clamp<std::size_t>(take, 1, order.size() - 1);
    std::set<std::string> held_out(order.begin(), order.begin() + take);
    for (std::size_t i = 0; i < users.size(); ++i) {
      in_test[i] = held_out.count(users[i]) > 0;
    }
  }

  SplitIndices out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (in_test[i] ? out.test : out.train).push_back(i);
  }
  return out;
}

DatasetSplit split_dataset(const std::vector<WindowFrame>& windows,
                           SplitPolicy policy, double test_fraction,
                           std::uint64_t seed) {
  std::vector<int> labels;
  std::vector<std::string> users;
  labels.reserve(windows.size());
  users.reserve(windows.size());
  for (const auto& w : windows) {
    labels.push_back(w.label);
    users.push_back(w.origin.user);
  }
  const SplitIndices idx =
      split_indices(labels, users, policy, test_fraction, seed);
  DatasetSplit split;
  split.seed = seed;
  split.policy = policy;
  for (std::size_t i : idx.train) split.train.push_back(windows[i]);
  for (std::size_t i : idx.test) split.test.push_back(windows[i]);
  return split;
}

}  // namespace dar
