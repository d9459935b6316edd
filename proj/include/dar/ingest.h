// dar/ingest.h

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

#ifndef DAR_INGEST_H_
#define DAR_INGEST_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dar {

/// Label value of a sample or window that carries no activity annotation.
inline constexpr int kUnlabeled = -1;

enum class DatasetFormat { kWisdm, kDaphnet, kSkoda };

DatasetFormat parse_dataset_format(const std::string& name);
std::string to_string(DatasetFormat format);

/// Canonical activity names of a dataset, in label-index order.
const std::vector<std::string>& canonical_labels(DatasetFormat format);

/// One triaxial reading. `t` is the record index inside the source file, so
/// dropped or malformed records leave a gap that windowing will not bridge.
struct AccelSample {
  std::int64_t t = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::string user;
  std::string recording;
  int label = kUnlabeled;
};

enum class DaphnetSensor { kAnkle, kThigh, kTrunk };
DaphnetSensor parse_daphnet_sensor(const std::string& name);

/// Column mapping for Skoda matrices. Each row holds a label column and a run
/// of fixed-width node groups; a group's first column is the node id and
/// `xyz_offset` locates the calibrated x/y/z readings inside the group.
struct SkodaColumns {
  int label_col = 0;
  int first_group_col = 1;
  int group_width = 7;
  int xyz_offset = 4;
  int node_id = 16;
};

struct LoaderOptions {
  /// Saturation bound B in g; readings are clamped to [-B, B].
  double bound = 2.0;
  /// Multiplier converting native units to g. Zero selects the format's
  /// default (WISDM m/s^2, Daphnet mg, Skoda already scaled).
  double scale = 0.0;
  /// Skip malformed records instead of failing. Unknown labels still fail.
  bool skip_malformed = false;
  DaphnetSensor sensor = DaphnetSensor::kAnkle;
  SkodaColumns skoda;
};

struct Dataset {
  std::vector<AccelSample> samples;
  std::vector<std::string> class_labels;
  std::size_t skipped_records = 0;
  std::size_t dropped_records = 0;
};

/// Loads one file (plain or gzip-compressed). Throws InputError on malformed
/// rows (naming line and field), unknown label codes and empty files.
Dataset load_dataset(const std::string& path, DatasetFormat format,
                     const LoaderOptions& options = {});

struct WindowOrigin {
  std::string user;
  std::string recording;
  std::int64_t start = 0;

  friend bool operator==(const WindowOrigin&, const WindowOrigin&) = default;
  friend auto operator<=>(const WindowOrigin&, const WindowOrigin&) = default;
};

struct WindowFrame {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
  int label = kUnlabeled;
  WindowOrigin origin;

  std::size_t size() const { return x.size(); }
};

/// Cuts every contiguous run of samples (same user and recording, consecutive
/// `t`) into windows of `n` samples taken every `stride` samples. A window's
/// label is the majority label of its samples; ties go to the lowest label
/// index and windows without labeled samples stay unlabeled.
std::vector<WindowFrame> make_windows(const std::vector<AccelSample>& samples,
                                      int n, int stride);

/// floor((length - n) / stride) + 1 for length >= n, else 0.
std::size_t window_count(std::size_t length, int n, int stride);

/// Adds i.i.d. N(0, sigma^2) noise per axis and clamps to [-bound, bound].
std::vector<AccelSample> inject_noise(const std::vector<AccelSample>& samples,
                                      double sigma, double bound,
                                      std::uint64_t seed);

}  // namespace dar

#endif  // DAR_INGEST_H_
