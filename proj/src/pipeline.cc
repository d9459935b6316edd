// pipeline.cc

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

#include "dar/pipeline.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "dar/error.h"
#include "dar/model_io.h"

namespace dar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double default_rate(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kWisdm: return 20.0;
    case DatasetFormat::kDaphnet: return 64.0;
    case DatasetFormat::kSkoda: return 98.0;
  }
  return 0.0;
}

std::string sensor_name(DaphnetSensor s) {
  switch (s) {
    case DaphnetSensor::kAnkle: return "ankle";
    case DaphnetSensor::kThigh: return "thigh";
    case DaphnetSensor::kTrunk: return "trunk";
  }
  return "ankle";
}

std::string emission_name(EmissionScaling e) {
  return e == EmissionScaling::kUniformPrior ? "uniform" : "scaled-likelihood";
}

EmissionScaling parse_emission(const std::string& name) {
  if (name == "scaled-likelihood") return EmissionScaling::kScaledLikelihood;
  if (name == "uniform") return EmissionScaling::kUniformPrior;
  throw ConfigError("unknown emission scaling '" + name +
                    "' (expected scaled-likelihood or uniform)");
}

json rbm_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"initial_momentum", c.initial_momentum},
          {"final_momentum", c.final_momentum},
          {"momentum_switch_epoch", c.momentum_switch_epoch},
          {"weight_decay", c.weight_decay}};
}

TrainConfig rbm_from_json(const json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.initial_momentum = j.at("initial_momentum").get<double>();
  c.final_momentum = j.at("final_momentum").get<double>();
  c.momentum_switch_epoch = j.at("momentum_switch_epoch").get<int>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.validate();
  return c;
}

// Overlays `user` onto `base`, rejecting keys the defaults do not know.
void merge_strict(json& base, const json& user, const std::string& where) {
  if (!user.is_object()) throw ConfigError("config section '" + where + "' must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    if (base[key].is_object()) {
      merge_strict(base[key], value, path);
    } else {
      base[key] = value;
    }
  }
}

std::string resolve_data_path(const std::string& path) {
  if (fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("DAR_DATA_DIR")) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

std::vector<int> labels_of(const std::vector<SpectralFeature>& features) {
  std::vector<int> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.label);
  return out;
}

// Labeled rows only.
void labeled_rows(const std::vector<SpectralFeature>& features, const Standardizer& standardizer,
                  Eigen::MatrixXd& x, std::vector<int>& y) {
  std::vector<SpectralFeature> kept;
  for (const auto& f : features) {
    if (f.label != kUnlabeled) kept.push_back(f);
  }
  x = kept.empty() ? Eigen::MatrixXd(0, standardizer.dim())
                   : standardizer.apply_rows(feature_matrix(kept));
  y = labels_of(kept);
}

std::optional<int> positive_index(const RunConfig& config,
                                  const std::vector<std::string>& labels) {
  if (labels.size() != 2) return std::nullopt;
  const std::string wanted =
      config.dataset.positive_class.empty() ? "freeze" : config.dataset.positive_class;
  const auto it = std::find(labels.begin(), labels.end(), wanted);
  if (it == labels.end()) {
    if (!config.dataset.positive_class.empty()) {
      throw ConfigError("positive class '" + wanted + "' is not a class label");
    }
    return 1;
  }
  return static_cast<int>(it - labels.begin());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

struct LoadedRun {
  ManifestInfo manifest;
  FeatureSet features;
  PreparedSplit split;
  DbnModel model;
  Standardizer standardizer;
};

LoadedRun load_run(const std::string& run_dir, const std::optional<std::string>& features_path) {
  LoadedRun run;
  run.manifest = read_manifest((fs::path(run_dir) / "manifest.json").string());
  std::string path = run.manifest.features_path;
  if (features_path) {
    path = *features_path;
  } else if (sha256_file(path) != run.manifest.features_sha256) {
    throw InputError("feature file '" + path + "' changed since training (checksum mismatch)");
  }
  run.features = read_features(path);
  run.model = load_model((fs::path(run_dir) / "model.dbn").string());
  run.standardizer = Standardizer::load((fs::path(run_dir) / "standardizer.txt").string());
  if (run.features.dim() != run.model.input_dim() ||
      run.standardizer.dim() != run.model.input_dim()) {
    throw DimensionError("model expects feature length L=" +
                         std::to_string(run.model.input_dim()) + " but '" + path +
                         "' has L=" + std::to_string(run.features.dim()));
  }
  if (run.features.class_labels != run.model.class_labels) {
    throw ConfigError("feature file classes differ from the model's classes");
  }
  run.split = prepare_split(run.features, run.manifest.config);
  return run;
}

// Groups features by (user, recording) and orders each group by start.
std::vector<SpectralFeature> recording_order(std::vector<SpectralFeature> features) {
  std::stable_sort(features.begin(), features.end(),
                   [](const SpectralFeature& a, const SpectralFeature& b) {
                     return a.origin < b.origin;
                   });
  return features;
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << 100.0 * *v;
  return out.str();
}

}  // namespace

double RunConfig::sampling_rate() const {
  return dataset.sampling_rate_hz > 0.0 ? dataset.sampling_rate_hz
                                        : default_rate(dataset.format);
}

double RunConfig::window_seconds() const {
  if (window.seconds > 0.0) return window.seconds;
  return dataset.format == DatasetFormat::kWisdm ? 10.0 : 4.0;
}

int RunConfig::window_length() const {
  const double samples = window_seconds() * sampling_rate();
  const double rounded = std::round(samples);
  if (std::abs(samples - rounded) > 1e-9 || rounded < 2 ||
      static_cast<long long>(rounded) % 2 != 0) {
    throw ConfigError("window of " + std::to_string(window_seconds()) + " s at " +
                      std::to_string(sampling_rate()) +
                      " Hz is not an even whole number of samples");
  }
  return static_cast<int>(rounded);
}

int RunConfig::stride() const {
  if (window.stride < 0) throw ConfigError("window stride must be >= 0");
  return window.stride == 0 ? window_length() : window.stride;
}

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["threads"] = threads;
  j["dataset"] = {{"format", to_string(dataset.format)},
                  {"paths", dataset.paths},
                  {"sensor", sensor_name(dataset.sensor)},
                  {"sampling_rate_hz", dataset.sampling_rate_hz},
                  {"bound_g", dataset.bound_g},
                  {"scale", dataset.scale},
                  {"skip_malformed", dataset.skip_malformed},
                  {"positive_class", dataset.positive_class},
                  {"skoda",
                   {{"label_col", dataset.skoda.label_col},
                    {"first_group_col", dataset.skoda.first_group_col},
                    {"group_width", dataset.skoda.group_width},
                    {"xyz_offset", dataset.skoda.xyz_offset},
                    {"node_id", dataset.skoda.node_id}}}};
  j["window"] = {{"seconds", window.seconds}, {"stride", window.stride}};
  j["spectral"] = {{"hann", spectral.hann},
                   {"log_magnitude", spectral.log_magnitude},
                   {"log_floor", spectral.log_floor}};
  j["model"] = {{"layers", model.layers},
                {"first_layer", rbm_json(model.first_layer)},
                {"upper_layers", rbm_json(model.upper_layers)},
                {"fine_tune",
                 {{"learning_rate", model.fine_tune.learning_rate},
                  {"epochs", model.fine_tune.epochs},
                  {"batch_size", model.fine_tune.batch_size},
                  {"patience", model.fine_tune.patience}}}};
  j["split"] = {{"policy", to_string(split.policy)}, {"test_fraction", split.test_fraction}};
  j["pipeline"] = {{"pretrain", pipeline.pretrain},
                   {"hmm", pipeline.hmm},
                   {"noise_sigma", pipeline.noise_sigma},
                   {"hmm_smoothing", pipeline.hmm_smoothing},
                   {"emission", emission_name(pipeline.emission)}};
  return j;
}

RunConfig RunConfig::from_json(const json& user) {
  json j = RunConfig{}.to_json();
  merge_strict(j, user, "");
  try {
    RunConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.threads = j.at("threads").get<int>();
    const json& d = j.at("dataset");
    c.dataset.format = parse_dataset_format(d.at("format").get<std::string>());
    c.dataset.paths = d.at("paths").get<std::vector<std::string>>();
    c.dataset.sensor = parse_daphnet_sensor(d.at("sensor").get<std::string>());
    c.dataset.sampling_rate_hz = d.at("sampling_rate_hz").get<double>();
    c.dataset.bound_g = d.at("bound_g").get<double>();
    c.dataset.scale = d.at("scale").get<double>();
    c.dataset.skip_malformed = d.at("skip_malformed").get<bool>();
    c.dataset.positive_class = d.at("positive_class").get<std::string>();
    const json& sk = d.at("skoda");
    c.dataset.skoda.label_col = sk.at("label_col").get<int>();
    c.dataset.skoda.first_group_col = sk.at("first_group_col").get<int>();
    c.dataset.skoda.group_width = sk.at("group_width").get<int>();
    c.dataset.skoda.xyz_offset = sk.at("xyz_offset").get<int>();
    c.dataset.skoda.node_id = sk.at("node_id").get<int>();
    c.window.seconds = j.at("window").at("seconds").get<double>();
    c.window.stride = j.at("window").at("stride").get<int>();
    c.spectral.hann = j.at("spectral").at("hann").get<bool>();
    c.spectral.log_magnitude = j.at("spectral").at("log_magnitude").get<bool>();
    c.spectral.log_floor = j.at("spectral").at("log_floor").get<double>();
    const json& m = j.at("model");
    c.model.layers = m.at("layers").get<std::vector<int>>();
    c.model.first_layer = rbm_from_json(m.at("first_layer"));
    c.model.upper_layers = rbm_from_json(m.at("upper_layers"));
    const json& ft = m.at("fine_tune");
    c.model.fine_tune.learning_rate = ft.at("learning_rate").get<double>();
    c.model.fine_tune.epochs = ft.at("epochs").get<int>();
    c.model.fine_tune.batch_size = ft.at("batch_size").get<int>();
    c.model.fine_tune.patience = ft.at("patience").get<int>();
    c.model.fine_tune.validate();
    c.split.policy = parse_split_policy(j.at("split").at("policy").get<std::string>());
    c.split.test_fraction = j.at("split").at("test_fraction").get<double>();
    const json& p = j.at("pipeline");
    c.pipeline.pretrain = p.at("pretrain").get<bool>();
    c.pipeline.hmm = p.at("hmm").get<bool>();
    c.pipeline.noise_sigma = p.at("noise_sigma").get<double>();
    c.pipeline.hmm_smoothing = p.at("hmm_smoothing").get<double>();
    c.pipeline.emission = parse_emission(p.at("emission").get<std::string>());
    if (c.model.layers.empty()) throw ConfigError("model.layers must not be empty");
    for (int w : c.model.layers) {
      if (w < 1) throw ConfigError("model.layers entries must be >= 1");
    }
    if (!(c.split.test_fraction > 0.0 && c.split.test_fraction < 1.0)) {
      throw ConfigError("split.test_fraction must lie in (0, 1)");
    }
    if (!(c.pipeline.noise_sigma >= 0.0)) throw ConfigError("pipeline.noise_sigma must be >= 0");
    if (!(c.dataset.bound_g > 0.0)) throw ConfigError("dataset.bound_g must be > 0");
    if (c.threads < 1) throw ConfigError("threads must be >= 1");
    c.window_length();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  // A run manifest carries the effective config under "config".
  if (j.contains("format") && j["format"] == "dar-manifest") return from_json(j.at("config"));
  return from_json(j);
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  }
  std::string pointer = "/" + assignment.substr(0, eq);
  std::replace(pointer.begin(), pointer.end(), '.', '/');
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  config[json::json_pointer(pointer)] = value;
}

std::uint64_t stage_seed(const RunConfig& config, Stage stage) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(stage));
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

json IngestSummary::to_json() const {
  json counts = json::object();
  for (std::size_t i = 0; i < class_labels.size(); ++i) counts[class_labels[i]] = class_counts[i];
  return {{"N", n},
          {"L", feature_length},
          {"samples", samples},
          {"skipped_records", skipped_records},
          {"dropped_records", dropped_records},
          {"recordings", recordings},
          {"windows", windows},
          {"unlabeled_windows", unlabeled},
          {"classes", class_labels.size()},
          {"class_counts", counts}};
}

IngestSummary cmd_ingest(const RunConfig& config, const std::string& out_path) {
  if (config.dataset.paths.empty()) throw ConfigError("dataset.paths is empty");
  const int n = config.window_length();
  LoaderOptions options;
  options.bound = config.dataset.bound_g;
  options.scale = config.dataset.scale;
  options.skip_malformed = config.dataset.skip_malformed;
  options.sensor = config.dataset.sensor;
  options.skoda = config.dataset.skoda;

  IngestSummary summary;
  std::vector<AccelSample> samples;
  for (const auto& raw_path : config.dataset.paths) {
    Dataset d = load_dataset(resolve_data_path(raw_path), config.dataset.format, options);
    summary.skipped_records += d.skipped_records;
    summary.dropped_records += d.dropped_records;
    summary.class_labels = d.class_labels;
    // Recording ids are made unique per file so streams never merge.
    const std::string prefix = config.dataset.paths.size() > 1
                                   ? fs::path(raw_path).stem().stem().string() + ":"
                                   : "";
    for (auto& s : d.samples) {
      if (!prefix.empty() && config.dataset.format == DatasetFormat::kWisdm) {
        s.recording = prefix + s.recording;
      }
      samples.push_back(std::move(s));
    }
  }
  summary.samples = samples.size();
  if (config.pipeline.noise_sigma > 0.0) {
    samples = inject_noise(samples, config.pipeline.noise_sigma, config.dataset.bound_g,
                           stage_seed(config, Stage::kNoise));
  }
  const auto windows = make_windows(samples, n, config.stride());
  std::map<std::pair<std::string, std::string>, int> recordings;
  for (const auto& s : samples) recordings[{s.user, s.recording}] = 1;
  summary.recordings = recordings.size();

  FeatureSet set;
  set.n = n;
  set.class_labels = summary.class_labels;
  set.features = spectral_features(windows, config.spectral);
  write_features(out_path, set);

  summary.n = n;
  summary.feature_length = feature_length(n);
  summary.windows = windows.size();
  summary.class_counts.assign(summary.class_labels.size(), 0);
  for (const auto& w : windows) {
    if (w.label == kUnlabeled) {
      ++summary.unlabeled;
    } else {
      ++summary.class_counts[static_cast<std::size_t>(w.label)];
    }
  }
  write_text(out_path + ".summary.json", summary.to_json().dump(2) + "\n");
  return summary;
}

PreparedSplit prepare_split(const FeatureSet& set, const RunConfig& config) {
  std::vector<std::string> users;
  users.reserve(set.features.size());
  for (const auto& f : set.features) users.push_back(f.origin.user);
  const SplitIndices idx =
      split_indices(labels_of(set.features), users, config.split.policy,
                    config.split.test_fraction, stage_seed(config, Stage::kSplit));
  PreparedSplit out;
  for (std::size_t i : idx.train) out.train.push_back(set.features[i]);
  for (std::size_t i : idx.test) out.test.push_back(set.features[i]);
  return out;
}

TrainSummary cmd_train(const RunConfig& config, const std::string& features_path,
                       const std::string& out_dir, std::ostream* log) {
  const std::string checksum = sha256_file(features_path);
  const FeatureSet set = read_features(features_path);
  if (set.features.empty()) throw InputError("'" + features_path + "' holds no features");
  const PreparedSplit split = prepare_split(set, config);
  if (split.train.empty()) throw ConfigError("training split is empty");

  const Standardizer standardizer = Standardizer::fit(split.train);
  const Eigen::MatrixXd pretrain_x = standardizer.apply_rows(feature_matrix(split.train));
  Eigen::MatrixXd train_x;
  std::vector<int> train_y;
  labeled_rows(split.train, standardizer, train_x, train_y);
  if (train_y.empty()) throw ConfigError("training split has no labeled windows");

  fs::create_directories(out_dir);
  std::ostringstream epoch_log;
  epoch_log << "stage,layer,epoch,value\n" << std::setprecision(17);
  SweepConfig sc;
  sc.pretrain = config.pipeline.pretrain;
  sc.first_layer = config.model.first_layer;
  sc.upper_layers = config.model.upper_layers;
  sc.fine_tune = config.model.fine_tune;
  sc.on_epoch = [&](const std::string& stage, int layer, int epoch, double value) {
    epoch_log << stage << ',' << layer << ',' << epoch + 1 << ',' << value << '\n';
    if (log != nullptr) {
      *log << stage << (layer >= 0 ? " layer " + std::to_string(layer + 1) : std::string())
           << " epoch " << epoch + 1 << ' ' << (stage == "pretrain" ? "recon " : "loss ")
           << value << std::endl;
    }
  };
  const std::uint64_t training_seed = stage_seed(config, Stage::kTraining);
  const TrainOutcome outcome = train_dbn(pretrain_x, train_x, train_y, set.class_labels,
                                         config.model.layers, sc, training_seed);

  const fs::path dir(out_dir);
  const std::string model_path = (dir / "model.dbn").string();
  save_model(outcome.model, model_path);
  standardizer.save((dir / "standardizer.txt").string());
  write_text(dir / "training_log.csv", epoch_log.str());

  TrainSummary summary;
  summary.model_path = model_path;
  summary.manifest_path = (dir / "manifest.json").string();
  summary.train_windows = split.train.size();
  summary.test_windows = split.test.size();
  summary.final_loss = outcome.loss.back();
  summary.final_train_accuracy = outcome.accuracy.back();

  json manifest;
  manifest["format"] = "dar-manifest";
  manifest["version"] = 1;
  manifest["config"] = config.to_json();
  manifest["features"] = {{"path", fs::absolute(features_path).string()},
                          {"sha256", checksum},
                          {"N", set.n},
                          {"L", set.dim()},
                          {"windows", set.features.size()}};
  manifest["seeds"] = {{"master", config.seed},
                       {"split", stage_seed(config, Stage::kSplit)},
                       {"training", training_seed}};
  manifest["split"] = {{"policy", to_string(config.split.policy)},
                       {"test_fraction", config.split.test_fraction},
                       {"train_windows", split.train.size()},
                       {"train_labeled", train_y.size()},
                       {"test_windows", split.test.size()}};
  manifest["training"] = {{"mode", config.pipeline.pretrain ? "generative+discriminative"
                                                            : "discriminative-only"},
                          {"fine_tune_epochs_run", outcome.loss.size()},
                          {"final_loss", summary.final_loss},
                          {"final_train_accuracy", summary.final_train_accuracy}};
  manifest["outputs"] = {{"model", "model.dbn"},
                         {"model_sha256", sha256_file(model_path)},
                         {"standardizer", "standardizer.txt"},
                         {"log", "training_log.csv"}};
  write_text(summary.manifest_path, manifest.dump(2) + "\n");
  return summary;
}

ManifestInfo read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest '" + path + "'");
  try {
    const json j = json::parse(in);
    if (j.at("format") != "dar-manifest") throw InputError("'" + path + "' is not a manifest");
    if (j.at("version") != 1) throw InputError("unsupported manifest version in '" + path + "'");
    ManifestInfo info;
    info.config = RunConfig::from_json(j.at("config"));
    info.features_path = j.at("features").at("path").get<std::string>();
    info.features_sha256 = j.at("features").at("sha256").get<std::string>();
    return info;
  } catch (const json::exception& e) {
    throw InputError("manifest '" + path + "': " + e.what());
  }
}

EvalReport cmd_eval(const std::string& run_dir, const std::optional<std::string>& features_path) {
  const LoadedRun run = load_run(run_dir, features_path);
  Eigen::MatrixXd x;
  std::vector<int> y;
  labeled_rows(run.split.test, run.standardizer, x, y);
  EvalReport report;
  report.confusion = ConfusionMatrix(run.model.class_labels);
  if (!y.empty()) {
    const auto predicted = predict_rows(x, run.model);
    for (std::size_t i = 0; i < y.size(); ++i) report.confusion.add(y[i], predicted[i]);
  }
  report.positive_class = positive_index(run.manifest.config, run.model.class_labels);
  report.text = metrics_report(report.confusion, report.positive_class);
  write_text(fs::path(run_dir) / "metrics.txt", report.text);
  return report;
}

DecodeReport cmd_decode(const std::string& run_dir,
                        const std::optional<std::string>& features_path) {
  const LoadedRun run = load_run(run_dir, features_path);
  const RunConfig& config = run.manifest.config;
  const auto& labels = run.model.class_labels;

  // Training label sequences: per recording in time order, broken at
  // unlabeled windows.
  std::vector<LabelSequence> sequences;
  const auto train = recording_order(run.split.train);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const bool new_recording = i == 0 || train[i].origin.user != train[i - 1].origin.user ||
                               train[i].origin.recording != train[i - 1].origin.recording;
    if (train[i].label == kUnlabeled) {
      sequences.emplace_back();
      continue;
    }
    if (new_recording || sequences.empty()) sequences.emplace_back();
    sequences.back().push_back(train[i].label);
  }
  const HmmModel hmm = estimate_hmm(sequences, labels, config.pipeline.hmm_smoothing);
  save_hmm(hmm, (fs::path(run_dir) / "hmm.json").string());

  std::vector<SpectralFeature> test = recording_order(run.split.test);
  for (auto& f : test) f = run.standardizer.apply(f);
  const auto segments =
      decode_dataset(test, run.model, hmm, segment_boundaries(test), config.pipeline.emission);

  DecodeReport report;
  report.framewise = ConfusionMatrix(labels);
  report.sequence = ConfusionMatrix(labels);
  report.segments = segments.size();
  std::ostringstream csv;
  csv << "segment,user,recording,start,true,framewise,viterbi\n";
  auto name = [&labels](int y) { return y == kUnlabeled ? std::string("unlabeled") : labels[y]; };
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    for (std::size_t t = 0; t < seg.truth.size(); ++t) {
      ++report.windows;
      csv << s << ',' << seg.user << ',' << seg.recording << ',' << seg.starts[t] << ','
          << name(seg.truth[t]) << ',' << name(seg.framewise[t]) << ','
          << name(seg.viterbi[t]) << '\n';
      if (seg.truth[t] != kUnlabeled) {
        report.framewise.add(seg.truth[t], seg.framewise[t]);
        report.sequence.add(seg.truth[t], seg.viterbi[t]);
      }
    }
  }
  write_text(fs::path(run_dir) / "decode.csv", csv.str());

  std::ostringstream text;
  text << "segments " << report.segments << "\n";
  text << "windows " << report.windows << "\n";
  text << "emission " << emission_name(config.pipeline.emission) << "\n";
  auto macro = [](const ConfusionMatrix& cm) -> std::optional<double> {
    if (cm.size() < 2 || cm.total() == 0) return std::nullopt;
    return multiclass_accuracy(cm);
  };
  text << "framewise_hit_rate " << percent(hit_rate(report.framewise)) << "\n";
  text << "framewise_macro_acc " << percent(macro(report.framewise)) << "\n";
  text << "viterbi_hit_rate " << percent(hit_rate(report.sequence)) << "\n";
  text << "viterbi_macro_acc " << percent(macro(report.sequence)) << "\n";
  report.text = text.str();
  write_text(fs::path(run_dir) / "decode_report.txt", report.text);
  return report;
}

std::string cmd_sweep(const RunConfig& config, const std::string& features_path,
                      const std::vector<int>& depths, const std::vector<int>& widths) {
  const FeatureSet set = read_features(features_path);
  const PreparedSplit split = prepare_split(set, config);
  const Standardizer standardizer = Standardizer::fit(split.train);
  SweepData data;
  data.pretrain_x = standardizer.apply_rows(feature_matrix(split.train));
  labeled_rows(split.train, standardizer, data.train_x, data.train_y);
  labeled_rows(split.test, standardizer, data.test_x, data.test_y);
  data.class_labels = set.class_labels;
  SweepConfig sc;
  sc.pretrain = config.pipeline.pretrain;
  sc.first_layer = config.model.first_layer;
  sc.upper_layers = config.model.upper_layers;
  sc.fine_tune = config.model.fine_tune;
  sc.master_seed = stage_seed(config, Stage::kTraining);
  const auto cells = evaluate_structure_sweep(data, depths, widths, sc);
  std::ostringstream out;
  out << "depth,width,train_accuracy,test_accuracy\n" << std::setprecision(6);
  for (const auto& c : cells) {
    out << c.depth << ',' << c.width << ',' << c.train_accuracy << ',' << c.test_accuracy << '\n';
  }
  return out.str();
}

std::string cmd_inspect(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  char head[8] = {};
  in.read(head, sizeof(head));
  std::ostringstream out;
  if (std::string_view(head, static_cast<std::size_t>(in.gcount())) == "DARDBN\r\n") {
    const DbnModel model = load_model(path);
    out << "DBN model " << path << "\n";
    out << "input_dim " << model.input_dim() << "\n";
    out << "depth " << model.depth() << "\n";
    for (int k = 0; k < model.depth(); ++k) {
      const auto& l = model.layers[static_cast<std::size_t>(k)];
      out << "layer " << k + 1 << ' ' << to_string(l.kind) << ' ' << l.visible_dim() << 'x'
          << l.hidden_dim() << " |W|=" << l.weights.norm() << "\n";
    }
    out << "head " << (model.head_initialized ? "initialized" : "uninitialized") << "\n";
    out << "classes";
    for (const auto& c : model.class_labels) out << ' ' << c;
    out << "\n";
    return out.str();
  }
  const HmmModel hmm = load_hmm(path);
  out << "HMM " << path << "\n" << std::fixed << std::setprecision(4);
  out << "states " << hmm.num_states() << "\n";
  for (int i = 0; i < hmm.num_states(); ++i) {
    out << std::setw(24) << hmm.class_labels[static_cast<std::size_t>(i)] << " pi "
        << hmm.prior(i) << " prior " << hmm.class_priors(i) << " psi";
    for (int j = 0; j < hmm.num_states(); ++j) out << ' ' << hmm.transition(i, j);
    out << "\n";
  }
  return out.str();
}

}  // namespace dar
