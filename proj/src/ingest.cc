// ingest.cc

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

#include "dar/ingest.h"

#include <algorithm>
#include <map>

#include "dar/error.h"
#include "dar/random.h"

namespace dar {

DatasetFormat parse_dataset_format(const std::string& name) {
  if (name == "wisdm") return DatasetFormat::kWisdm;
  if (name == "daphnet") return DatasetFormat::kDaphnet;
  if (name == "skoda") return DatasetFormat::kSkoda;
  throw ConfigError("unknown dataset format '" + name +
                    "' (expected wisdm, daphnet or skoda)");
}

std::string to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kWisdm: return "wisdm";
    case DatasetFormat::kDaphnet: return "daphnet";
    case DatasetFormat::kSkoda: return "skoda";
  }
  return "unknown";
}

const std::vector<std::string>& canonical_labels(DatasetFormat format) {
  static const std::vector<std::string> wisdm = {
      "Walking", "Jogging", "Upstairs", "Downstairs", "Sitting", "Standing"};
  static const std::vector<std::string> daphnet = {"no_freeze", "freeze"};
  static const std::vector<std::string> skoda = {
      "write_on_notepad",      "open_hood",
      "close_hood",            "check_gaps_front_door",
      "open_left_front_door",  "close_left_front_door",
      "close_both_left_doors", "check_trunk_gaps",
      "open_close_trunk",      "check_steering_wheel"};
  switch (format) {
    case DatasetFormat::kWisdm: return wisdm;
    case DatasetFormat::kDaphnet: return daphnet;
    case DatasetFormat::kSkoda: return skoda;
  }
  throw ConfigError("unknown dataset format");
}

DaphnetSensor parse_daphnet_sensor(const std::string& name) {
  if (name == "ankle") return DaphnetSensor::kAnkle;
  if (name == "thigh") return DaphnetSensor::kThigh;
  if (name == "trunk") return DaphnetSensor::kTrunk;
  throw ConfigError("unknown Daphnet sensor '" + name +
                    "' (expected ankle, thigh or trunk)");
}

std::size_t window_count(std::size_t length, int n, int stride) {
  if (n < 1 || stride < 1) return 0;
  const auto len = static_cast<std::size_t>(n);
  if (length < len) return 0;
  return (length - len) / static_cast<std::size_t>(stride) + 1;
}

namespace {

bool continues_run(const AccelSample& prev, const AccelSample& next) {
  return next.t == prev.t + 1 && next.user == prev.user &&
         next.recording == prev.recording;
}

int majority_label(const std::vector<AccelSample>& samples, std::size_t begin,
                   std::size_t n) {
  std::map<int, std::size_t> counts;
  for (std::size_t i = begin; i < begin + n; ++i) {
    if (samples[i].label != kUnlabeled) ++counts[samples[i].label];
  }
  int best = kUnlabeled;
  std::size_t best_count = 0;
  // std::map iterates in ascending label order, so ">" keeps the lowest
  // label among equal counts.
  for (const auto& [label, count] : counts) {
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

std::vector<WindowFrame> make_windows(const std::vector<AccelSample>& samples,
                                      int n, int stride) {
  if (n < 2 || n % 2 != 0) {
    throw ConfigError("window length must be even and >= 2, got " +
                      std::to_string(n));
  }
  if (stride < 1) {
    throw ConfigError("window stride must be >= 1, got " +
                      std::to_string(stride));
  }
  std::vector<WindowFrame> windows;
  std::size_t run_begin = 0;
  while (run_begin < samples.size()) {
    std::size_t run_end = run_begin + 1;
    while (run_end < samples.size() &&
           continues_run(samples[run_end - 1], samples[run_end])) {
      ++run_end;
    }
    const std::size_t count = window_count(run_end - run_begin, n, stride);
    for (std::size_t w = 0; w < count; ++w) {
      const std::size_t begin = run_begin + w * static_cast<std::size_t>(stride);
      WindowFrame frame;
      frame.x.reserve(n);
      frame.y.reserve(n);
      frame.z.reserve(n);
      for (std::size_t i = begin; i < begin + static_cast<std::size_t>(n); ++i) {
        frame.x.push_back(samples[i].x);
        frame.y.push_back(samples[i].y);
        frame.z.push_back(samples[i].z);
      }
      frame.label = majority_label(samples, begin, n);
      frame.origin = {samples[begin].user, samples[begin].recording,
                      samples[begin].t};
      windows.push_back(std::move(frame));
    }
    run_begin = run_end;
  }
  return windows;
}

std::vector<AccelSample> inject_noise(const std::vector<AccelSample>& samples,
                                      double sigma, double bound,
                                      std::uint64_t seed) {
  if (!(sigma >= 0.0)) {
    throw ConfigError("noise sigma must be >= 0");
  }
  if (!(bound > 0.0)) {
    throw ConfigError("saturation bound must be > 0");
  }
  std::vector<AccelSample> out = samples;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (auto& s : out) {
    s.x = std::clamp(s.x + sigma * rng.normal(), -bound, bound);
    s.y = std::clamp(s.y + sigma * rng.normal(), -bound, bound);
    s.z = std::clamp(s.z + sigma * rng.normal(), -bound, bound);
  }
  return out;
}

}  // namespace dar
