// dar/pipeline.h

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

#ifndef DAR_PIPELINE_H_
#define DAR_PIPELINE_H_

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dar/dbn.h"
#include "dar/feature_io.h"
#include "dar/hmm.h"
#include "dar/ingest.h"
#include "dar/metrics.h"
#include "dar/spectral.h"
#include "dar/split.h"
#include "dar/standardize.h"

namespace dar {

struct DatasetConfig {
  DatasetFormat format = DatasetFormat::kWisdm;
  std::vector<std::string> paths;
  DaphnetSensor sensor = DaphnetSensor::kAnkle;
  /// 0 selects the format's rate (WISDM 20 Hz, Daphnet 64 Hz, Skoda 98 Hz).
  double sampling_rate_hz = 0.0;
  double bound_g = 2.0;
  double scale = 0.0;
  bool skip_malformed = false;
  SkodaColumns skoda;
  /// Positive class for binary metrics; empty picks "freeze" when present.
  std::string positive_class;
};

struct WindowConfig {
  /// 0 selects the format's window (WISDM 10 s, Daphnet and Skoda 4 s).
  double seconds = 0.0;
  /// Samples between window starts; 0 means non-overlapping (stride = N).
  int stride = 0;
};

struct ModelConfig {
  std::vector<int> layers = {1000, 1000, 1000};
  TrainConfig first_layer = TrainConfig::gaussian_defaults();
  TrainConfig upper_layers = TrainConfig::binary_defaults();
  FineTuneConfig fine_tune;
};

struct SplitConfig {
  SplitPolicy policy = SplitPolicy::kRandomStratified;
  double test_fraction = 0.3;
};

struct PipelineFlags {
  bool pretrain = true;
  bool hmm = false;
  double noise_sigma = 0.0;
  double hmm_smoothing = 1.0;
  EmissionScaling emission = EmissionScaling::kScaledLikelihood;
};

/// Everything a run depends on. Per-stage seeds derive from `seed`.
struct RunConfig {
  DatasetConfig dataset;
  WindowConfig window;
  SpectralOptions spectral;
  ModelConfig model;
  SplitConfig split;
  PipelineFlags pipeline;
  std::uint64_t seed = 1;
  int threads = 1;

  double sampling_rate() const;
  double window_seconds() const;
  /// seconds x rate; throws ConfigError unless it is an even integer >= 2.
  int window_length() const;
  int stride() const;

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
};

/// Applies "a.b.c=value" overrides; value is parsed as JSON, falling back to a
/// plain string.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Stage identifiers for derive_seed(config.seed, stage).
enum class Stage : std::uint64_t { kSplit = 1, kNoise = 2, kTraining = 3 };
std::uint64_t stage_seed(const RunConfig& config, Stage stage);

std::string sha256_file(const std::string& path);

struct IngestSummary {
  int n = 0;
  int feature_length = 0;
  std::size_t samples = 0;
  std::size_t skipped_records = 0;
  std::size_t dropped_records = 0;
  std::size_t recordings = 0;
  std::size_t windows = 0;
  std::size_t unlabeled = 0;
  std::vector<std::string> class_labels;
  std::vector<std::size_t> class_counts;

  nlohmann::json to_json() const;
};

/// Loads every configured file, windows, transforms and writes the feature
/// dump to `out_path` plus `<out_path>.summary.json`.
IngestSummary cmd_ingest(const RunConfig& config, const std::string& out_path);

/// Split a feature set per the config; features keep their dump order.
struct PreparedSplit {
  std::vector<SpectralFeature> train;
  std::vector<SpectralFeature> test;
};
PreparedSplit prepare_split(const FeatureSet& set, const RunConfig& config);

struct TrainSummary {
  std::string model_path;
  std::string manifest_path;
  std::size_t train_windows = 0;
  std::size_t test_windows = 0;
  double final_loss = 0.0;
  double final_train_accuracy = 0.0;
};

/// Split, standardize, pretrain (unless disabled) and fine-tune. Writes
/// model.dbn, standardizer.txt, training_log.csv and manifest.json into
/// `out_dir`. Progress lines go to `log` when non-null.
TrainSummary cmd_train(const RunConfig& config, const std::string& features_path,
                       const std::string& out_dir, std::ostream* log = nullptr);

/// Reads the config and feature path recorded in a manifest and checks the
/// feature checksum.
struct ManifestInfo {
  RunConfig config;
  std::string features_path;
  std::string features_sha256;
};
ManifestInfo read_manifest(const std::string& path);

struct EvalReport {
  ConfusionMatrix confusion{std::vector<std::string>{}};
  std::optional<int> positive_class;
  std::string text;
};

/// Frame-wise evaluation of a trained run on its test split. Writes
/// metrics.txt into the run directory. `features_path` overrides the
/// manifest's feature file.
EvalReport cmd_eval(const std::string& run_dir,
                    const std::optional<std::string>& features_path = {});

struct DecodeReport {
  std::size_t segments = 0;
  std::size_t windows = 0;
  ConfusionMatrix framewise{std::vector<std::string>{}};
  ConfusionMatrix sequence{std::vector<std::string>{}};
  std::string text;
};

/// Estimates the HMM from the training split's label sequences, decodes each
/// test recording and writes hmm.json, decode.csv and decode_report.txt.
DecodeReport cmd_decode(const std::string& run_dir,
                        const std::optional<std::string>& features_path = {});

/// Structure sweep over the run config's data; returns CSV text
/// depth,width,train_accuracy,test_accuracy.
std::string cmd_sweep(const RunConfig& config, const std::string& features_path,
                      const std::vector<int>& depths, const std::vector<int>& widths);

/// Human-readable summary of a model (.dbn) or HMM (.json) file.
std::string cmd_inspect(const std::string& path);

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitInput = 3,
  kExitDivergence = 4,
};

}  // namespace dar

#endif  // DAR_PIPELINE_H_
