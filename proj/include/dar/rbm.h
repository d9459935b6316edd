// dar/rbm.h

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

#ifndef DAR_RBM_H_
#define DAR_RBM_H_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dar/random.h"

namespace dar {

enum class LayerKind { kGaussianBinary, kBinaryBinary };

std::string to_string(LayerKind kind);

/// One restricted Boltzmann machine. `weights` is visible_dim x hidden_dim.
/// Gaussian-binary layers model unit-variance visibles and may only appear
/// first in a stack.
struct RbmLayer {
  LayerKind kind = LayerKind::kBinaryBinary;
  Eigen::MatrixXd weights;
  Eigen::VectorXd visible_bias;
  Eigen::VectorXd hidden_bias;

  Eigen::Index visible_dim() const { return weights.rows(); }
  Eigen::Index hidden_dim() const { return weights.cols(); }

  /// Throws DimensionError / DivergenceError on inconsistent or non-finite
  /// parameters.
  void validate() const;

  static RbmLayer zeros(LayerKind kind, Eigen::Index visible, Eigen::Index hidden);
  /// W ~ N(0, stddev^2), zero biases.
  static RbmLayer random(LayerKind kind, Eigen::Index visible,
                         Eigen::Index hidden, Rng& rng, double stddev = 0.01);
};

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 75;
  int batch_size = 75;
  double initial_momentum = 0.5;
  double final_momentum = 0.9;
  /// Epochs (counted from 0) below this use initial_momentum.
  int momentum_switch_epoch = 5;
  double weight_decay = 2e-4;
  std::uint64_t seed = 0;

  void validate() const;

  /// First-layer defaults: rate 0.001, 150 epochs, batch 75.
  static TrainConfig gaussian_defaults();
  /// Upper-layer defaults: rate 0.01, 75 epochs, batch 75.
  static TrainConfig binary_defaults();
};

/// 1/2 (v-b)'(v-b) - c'h - v'Wh.
double grbm_energy(const Eigen::VectorXd& v, const Eigen::VectorXd& h,
                   const RbmLayer& layer);
/// -b'v - c'h - v'Wh.
double brbm_energy(const Eigen::VectorXd& v, const Eigen::VectorXd& h,
                   const RbmLayer& layer);
/// Dispatches on layer.kind.
double energy(const Eigen::VectorXd& v, const Eigen::VectorXd& h,
              const RbmLayer& layer);

/// P(h_j = 1 | v) = sigmoid(c_j + v'W_j).
Eigen::VectorXd hidden_conditional(const Eigen::VectorXd& v, const RbmLayer& layer);
/// Binary visibles: P(v_i = 1 | h). Gaussian visibles: the mean b_i + W_i h.
Eigen::VectorXd visible_conditional(const Eigen::VectorXd& h, const RbmLayer& layer);

/// Row-batched forms; rows of the argument are samples.
Eigen::MatrixXd hidden_conditional_rows(const Eigen::MatrixXd& v, const RbmLayer& layer);
Eigen::MatrixXd visible_conditional_rows(const Eigen::MatrixXd& h, const RbmLayer& layer);

/// Parameter deltas (or gradients) with the layer's shapes.
struct RbmGradient {
  Eigen::MatrixXd weights;
  Eigen::VectorXd visible_bias;
  Eigen::VectorXd hidden_bias;

  static RbmGradient zeros_like(const RbmLayer& layer);
};

struct CdOptions {
  /// Number of Gibbs steps k.
  int steps = 1;
  /// Sample the final visible state instead of using its mean. The default
  /// (mean reconstruction) is the CD-1 training convention; sampling gives an
  /// unbiased chain estimate for long-run checks.
  bool sample_reconstruction = false;
};

struct CdResult {
  RbmGradient delta;
  /// Sum over the batch of |v - reconstruction|^2.
  double reconstruction_error = 0.0;
};

/// Contrastive divergence step on a batch (rows = visible vectors):
///   dW = alpha (<v h'>_data - <v h'>_k) / batch, same for the biases.
/// Hidden states driven by data are sampled; statistics use hidden
/// probabilities; the reconstruction is the visible mean unless
/// `options.sample_reconstruction`. Random draws come from `rng` in batch
/// row order for every Gibbs step.
CdResult cd_update(const Eigen::MatrixXd& batch, const RbmLayer& layer,
                   double alpha, Rng& rng, const CdOptions& options = {});

/// Same, but row i draws from its own generator seeded with seeds[i]. The
/// result does not depend on the order of (row, seed) pairs.
CdResult cd_update_seeded(const Eigen::MatrixXd& batch, const RbmLayer& layer,
                          double alpha, std::span<const std::uint64_t> seeds,
                          const CdOptions& options = {});

/// CD-1 deltas with the default conventions.
RbmGradient cd1_update(const Eigen::MatrixXd& batch, const RbmLayer& layer,
                       double alpha, Rng& rng);

/// Called after every epoch with the zero-based epoch and its mean
/// reconstruction error (RBMs) or training loss (fine-tuning).
using EpochCallback = std::function<void(int epoch, double value)>;

struct RbmTrainResult {
  RbmLayer layer;
  /// Mean squared reconstruction error per sample, one entry per epoch.
  std::vector<double> reconstruction_error;
  /// Frobenius norm of W after each epoch.
  std::vector<double> weight_norm;
};

/// CD-1 training over shuffled mini-batches with momentum and L2 weight
/// decay. Aborts with DivergenceError when any parameter exceeds 1e6 in
/// magnitude or the reconstruction error is not finite.
RbmTrainResult train_rbm(const Eigen::MatrixXd& data, RbmLayer layer,
                         const TrainConfig& config,
                         const EpochCallback& on_epoch = {});

/// Largest visible + hidden count accepted by the enumeration routines.
inline constexpr int kMaxEnumerationUnits = 16;

/// log Z by summing exp(-E) over every joint binary state.
double log_partition_exact(const RbmLayer& layer);

/// Mean log P(v) over the rows of `data`, by enumeration.
double log_likelihood_exact(const Eigen::MatrixXd& data, const RbmLayer& layer);

/// Gradient of the mean log-likelihood with respect to (W, b, c), computed
/// exactly by enumerating all 2^(visible+hidden) joint states. Binary-binary
/// layers only.
RbmGradient exact_gradient(const Eigen::MatrixXd& data, const RbmLayer& layer);

}  // namespace dar

#endif  // DAR_RBM_H_
