// dar/dbn.h

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

#ifndef DAR_DBN_H_
#define DAR_DBN_H_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dar/rbm.h"

namespace dar {

/// Stacked RBMs (first gaussian-binary, rest binary-binary) topped by a
/// softmax regression head over the activity classes.
struct DbnModel {
  std::vector<RbmLayer> layers;
  /// top hidden dim x number of classes.
  Eigen::MatrixXd head_weights;
  Eigen::VectorXd head_bias;
  std::vector<std::string> class_labels;
  bool head_initialized = false;

  Eigen::Index input_dim() const {
    return layers.empty() ? 0 : layers.front().visible_dim();
  }
  int depth() const { return static_cast<int>(layers.size()); }
  int num_classes() const { return static_cast<int>(class_labels.size()); }
  std::vector<int> widths() const;

  /// Checks stacking, kinds and head shapes.
  void validate() const;

  /// Zero head: the initial posterior is exactly uniform.
  void init_head(std::vector<std::string> labels);
};

/// Stack with N(0, 0.01^2) weights and zero biases; used as the starting
/// point of discriminative-only training.
DbnModel random_dbn(Eigen::Index input_dim, const std::vector<int>& layer_dims,
                    std::uint64_t seed);

struct PretrainResult {
  DbnModel model;
  /// Per layer, per epoch mean reconstruction error.
  std::vector<std::vector<double>> reconstruction_error;
};

/// Greedy layer-wise pretraining. Takes a bare feature matrix (rows =
/// standardized spectral features), so labels cannot leak in; unlabeled
/// windows are welcome. Layer k > 0 trains on the hidden probabilities of
/// the frozen layer k-1. `configs` holds one entry per layer. The head is
/// left uninitialized.
/// `on_epoch` receives (layer index, epoch, reconstruction error).
PretrainResult pretrain_greedy(
    const Eigen::MatrixXd& features, const std::vector<int>& layer_dims,
    const std::vector<TrainConfig>& configs,
    const std::function<void(int layer, int epoch, double error)>& on_epoch = {});

/// Deterministic mean-field pass: one hidden-probability vector per layer.
std::vector<Eigen::VectorXd> forward(const Eigen::VectorXd& x, const DbnModel& model);
/// Row-batched; returns the top activation only.
Eigen::MatrixXd forward_top_rows(const Eigen::MatrixXd& x, const DbnModel& model);

/// Softmax of the head logits.
Eigen::VectorXd posterior(const Eigen::VectorXd& x, const DbnModel& model);
Eigen::MatrixXd posterior_rows(const Eigen::MatrixXd& x, const DbnModel& model);
/// Numerically stable softmax; exposed for tests and the HMM layer.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Zero-based index of the largest posterior; ties go to the lowest index.
int predict(const Eigen::VectorXd& x, const DbnModel& model);
std::vector<int> predict_rows(const Eigen::MatrixXd& x, const DbnModel& model);
int argmax(const Eigen::VectorXd& values);

struct FineTuneConfig {
  double learning_rate = 0.1;
  int epochs = 1000;
  int batch_size = 75;
  /// Stop after this many epochs without a lower training loss; 0 disables.
  int patience = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FineTuneResult {
  DbnModel model;
  std::vector<double> loss;
  std::vector<double> accuracy;
};

/// Mini-batch gradient descent on the mean cross-entropy through every layer
/// and the head. Labels are zero-based class indices. Loss and accuracy per
/// epoch are accumulated over the epoch's batches before each update.
FineTuneResult fine_tune(DbnModel model, const Eigen::MatrixXd& x,
                         const std::vector<int>& labels,
                         const FineTuneConfig& config,
                         const EpochCallback& on_epoch = {});

/// Mean -log P(label | x).
double cross_entropy(const DbnModel& model, const Eigen::MatrixXd& x,
                     const std::vector<int>& labels);

/// Gradient of cross_entropy with respect to every layer's weights and hidden
/// biases and the head.
struct DbnGradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> hidden_bias;
  Eigen::MatrixXd head_weights;
  Eigen::VectorXd head_bias;
};
DbnGradient loss_gradient(const DbnModel& model, const Eigen::MatrixXd& x,
                          const std::vector<int>& labels);

/// Fraction of rows whose prediction equals the label.
double hit_rate(const DbnModel& model, const Eigen::MatrixXd& x,
                const std::vector<int>& labels);

struct SweepData {
  /// Standardized training features; unlabeled rows may only feed pretraining.
  Eigen::MatrixXd pretrain_x;
  Eigen::MatrixXd train_x;
  std::vector<int> train_y;
  Eigen::MatrixXd test_x;
  std::vector<int> test_y;
  std::vector<std::string> class_labels;
};

struct SweepConfig {
  bool pretrain = true;
  TrainConfig first_layer = TrainConfig::gaussian_defaults();
  TrainConfig upper_layers = TrainConfig::binary_defaults();
  FineTuneConfig fine_tune;
  std::uint64_t master_seed = 0;
  /// Progress hook: (stage, layer, epoch, value); stage is "pretrain" or
  /// "finetune" (layer -1).
  std::function<void(const std::string& stage, int layer, int epoch, double value)>
      on_epoch;
};

struct SweepCell {
  int depth = 0;
  int width = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

/// Trains one depth x width model per grid cell (depth-major order). Cell i
/// draws every seed from derive_seed(master_seed, i), so results do not
/// depend on evaluation order.
std::vector<SweepCell> evaluate_structure_sweep(const SweepData& data,
                                                const std::vector<int>& depth_grid,
                                                const std::vector<int>& width_grid,
                                                const SweepConfig& config);

/// Pretrain (optional) and fine-tune one architecture with seeds derived from
/// `seed`. Building block of the sweep and of the CLI train command.
struct TrainOutcome {
  DbnModel model;
  std::vector<std::vector<double>> reconstruction_error;
  std::vector<double> loss;
  std::vector<double> accuracy;
};
TrainOutcome train_dbn(const Eigen::MatrixXd& pretrain_x, const Eigen::MatrixXd& train_x,
                       const std::vector<int>& train_y,
                       const std::vector<std::string>& class_labels,
                       const std::vector<int>& layer_dims, const SweepConfig& config,
                       std::uint64_t seed);

}  // namespace dar

#endif  // DAR_DBN_H_
