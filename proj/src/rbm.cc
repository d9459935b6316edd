// rbm.cc

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

#include "dar/rbm.h"

#include <cmath>
#include <numeric>

#include "dar/error.h"

namespace dar {
namespace {

constexpr double kParameterLimit = 1e6;

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

void check_dims(const Eigen::VectorXd& v, const Eigen::VectorXd& h,
                const RbmLayer& layer) {
  if (v.size() != layer.visible_dim() || h.size() != layer.hidden_dim()) {
    throw DimensionError("energy: got (" + std::to_string(v.size()) + ", " +
                         std::to_string(h.size()) + "), layer is " +
                         std::to_string(layer.visible_dim()) + "x" +
                         std::to_string(layer.hidden_dim()));
  }
}

void check_binary_range(const Eigen::MatrixXd& data, const RbmLayer& layer) {
  if (layer.kind != LayerKind::kBinaryBinary) return;
  if ((data.array() < 0.0).any() || (data.array() > 1.0).any()) {
    throw ConfigError("binary-binary layer requires inputs in [0, 1]");
  }
}

bool within_limits(const Eigen::MatrixXd& m) {
  return m.allFinite() && m.cwiseAbs().maxCoeff() <= kParameterLimit;
}

bool within_limits(const Eigen::VectorXd& v) {
  return v.size() == 0 || (v.allFinite() && v.cwiseAbs().maxCoeff() <= kParameterLimit);
}

// Gibbs chain shared by the single-generator and per-row-generator entry
// points. `rng_for_row(r)` returns the generator that row r draws from;
// draws happen step by step, rows in order within a step.
template <typename RowRng>
CdResult contrastive_divergence(const Eigen::MatrixXd& batch,
                                const RbmLayer& layer, double alpha,
                                const CdOptions& options, RowRng&& rng_for_row) {
  if (batch.rows() == 0) throw ConfigError("contrastive divergence: empty batch");
  if (batch.cols() != layer.visible_dim()) {
    throw DimensionError("contrastive divergence: batch has " +
                         std::to_string(batch.cols()) + " columns, layer has " +
                         std::to_string(layer.visible_dim()) + " visible units");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("learning rate must be finite and >= 0");
  }
  if (options.steps < 1) throw ConfigError("CD needs at least one Gibbs step");
  check_binary_range(batch, layer);

  const Eigen::Index rows = batch.rows();
  const Eigen::Index nh = layer.hidden_dim();
  const Eigen::Index nv = layer.visible_dim();

  const Eigen::MatrixXd h_data = hidden_conditional_rows(batch, layer);
  Eigen::MatrixXd h_state(rows, nh);
  auto sample_hidden = [&](const Eigen::MatrixXd& probs) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      Rng& rng = rng_for_row(r);
      for (Eigen::Index j = 0; j < nh; ++j) {
        h_state(r, j) = rng.uniform() < probs(r, j) ? 1.0 : 0.0;
      }
    }
  };
  sample_hidden(h_data);

  Eigen::MatrixXd v_model;
  Eigen::MatrixXd h_model;
  for (int step = 1; step <= options.steps; ++step) {
    v_model = visible_conditional_rows(h_state, layer);
    const bool last = step == options.steps;
    if (!last || options.sample_reconstruction) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        Rng& rng = rng_for_row(r);
        for (Eigen::Index i = 0; i < nv; ++i) {
          if (layer.kind == LayerKind::kBinaryBinary) {
            v_model(r, i) = rng.uniform() < v_model(r, i) ? 1.0 : 0.0;
          } else {
            v_model(r, i) += rng.normal();
          }
        }
      }
    }
    h_model = hidden_conditional_rows(v_model, layer);
    if (!last) sample_hidden(h_model);
  }

  const double scale = alpha / static_cast<double>(rows);
  CdResult result;
  result.delta.weights =
      scale * (batch.transpose() * h_data - v_model.transpose() * h_model);
  result.delta.visible_bias =
      scale * (batch.colwise().sum() - v_model.colwise().sum()).transpose();
  result.delta.hidden_bias =
      scale * (h_data.colwise().sum() - h_model.colwise().sum()).transpose();
  result.reconstruction_error = (batch - v_model).squaredNorm();
  return result;
}

}  // namespace

std::string to_string(LayerKind kind) {
  return kind == LayerKind::kGaussianBinary ? "gaussian-binary" : "binary-binary";
}

void RbmLayer::validate() const {
  if (visible_bias.size() != weights.rows() || hidden_bias.size() != weights.cols()) {
    throw DimensionError("RBM layer: bias lengths do not match a " +
                         std::to_string(weights.rows()) + "x" +
                         std::to_string(weights.cols()) + " weight matrix");
  }
  if (!weights.allFinite() || !visible_bias.allFinite() || !hidden_bias.allFinite()) {
    throw DivergenceError("RBM layer has non-finite parameters");
  }
}

RbmLayer RbmLayer::zeros(LayerKind kind, Eigen::Index visible, Eigen::Index hidden) {
  if (visible < 1 || hidden < 1) throw ConfigError("RBM layer dimensions must be >= 1");
  RbmLayer layer;
  layer.kind = kind;
  layer.weights = Eigen::MatrixXd::Zero(visible, hidden);
  layer.visible_bias = Eigen::VectorXd::Zero(visible);
  layer.hidden_bias = Eigen::VectorXd::Zero(hidden);
  return layer;
}

RbmLayer RbmLayer::random(LayerKind kind, Eigen::Index visible,
                          Eigen::Index hidden, Rng& rng, double stddev) {
  RbmLayer layer = zeros(kind, visible, hidden);
  // Column-major fill: weights(i, j) for i fastest.
  for (Eigen::Index j = 0; j < hidden; ++j) {
    for (Eigen::Index i = 0; i < visible; ++i) {
      layer.weights(i, j) = stddev * rng.normal();
    }
  }
  return layer;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be finite and >= 0");
  }
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  for (double m : {initial_momentum, final_momentum}) {
    if (!(m >= 0.0 && m < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  }
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
}

TrainConfig TrainConfig::gaussian_defaults() {
  TrainConfig cfg;
  cfg.learning_rate = 0.001;
  cfg.epochs = 150;
  return cfg;
}

TrainConfig TrainConfig::binary_defaults() {
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.epochs = 75;
  return cfg;
}

double grbm_energy(const Eigen::VectorXd& v, const Eigen::VectorXd& h,
                   const RbmLayer& layer) {
  if (layer.kind != LayerKind::kGaussianBinary) {
    throw ConfigError("grbm_energy needs a gaussian-binary layer");
  }
  check_dims(v, h, layer);
  return 0.5 * (v - layer.visible_bias).squaredNorm() - layer.hidden_bias.dot(h) -
         v.dot(layer.weights * h);
}

double brbm_energy(const Eigen::VectorXd& v, const Eigen::VectorXd& h,
                   const RbmLayer& layer) {
  if (layer.kind != LayerKind::kBinaryBinary) {
    throw ConfigError("brbm_energy needs a binary-binary layer");
  }
  check_dims(v, h, layer);
  return -layer.visible_bias.dot(v) - layer.hidden_bias.dot(h) -
         v.dot(layer.weights * h);
}

double energy(const Eigen::VectorXd& v, const Eigen::VectorXd& h,
              const RbmLayer& layer) {
  return layer.kind == LayerKind::kGaussianBinary ? grbm_energy(v, h, layer)
                                                  : brbm_energy(v, h, layer);
}

Eigen::VectorXd hidden_conditional(const Eigen::VectorXd& v, const RbmLayer& layer) {
  if (v.size() != layer.visible_dim()) {
    throw DimensionError("hidden_conditional: input has " + std::to_string(v.size()) +
                         " entries, layer has " +
                         std::to_string(layer.visible_dim()) + " visible units");
  }
  return sigmoid(layer.weights.transpose() * v + layer.hidden_bias);
}

Eigen::VectorXd visible_conditional(const Eigen::VectorXd& h, const RbmLayer& layer) {
  if (h.size() != layer.hidden_dim()) {
    throw DimensionError("visible_conditional: input has " + std::to_string(h.size()) +
                         " entries, layer has " +
                         std::to_string(layer.hidden_dim()) + " hidden units");
  }
  Eigen::VectorXd mean = layer.weights * h + layer.visible_bias;
  if (layer.kind == LayerKind::kGaussianBinary) return mean;
  return sigmoid(mean);
}

Eigen::MatrixXd hidden_conditional_rows(const Eigen::MatrixXd& v, const RbmLayer& layer) {
  if (v.cols() != layer.visible_dim()) {
    throw DimensionError("hidden_conditional: rows have " + std::to_string(v.cols()) +
                         " entries, layer has " +
                         std::to_string(layer.visible_dim()) + " visible units");
  }
  Eigen::MatrixXd pre = v * layer.weights;
  pre.rowwise() += layer.hidden_bias.transpose();
  return sigmoid(pre);
}

Eigen::MatrixXd visible_conditional_rows(const Eigen::MatrixXd& h, const RbmLayer& layer) {
  if (h.cols() != layer.hidden_dim()) {
    throw DimensionError("visible_conditional: rows have " + std::to_string(h.cols()) +
                         " entries, layer has " +
                         std::to_string(layer.hidden_dim()) + " hidden units");
  }
  Eigen::MatrixXd mean = h * layer.weights.transpose();
  mean.rowwise() += layer.visible_bias.transpose();
  if (layer.kind == LayerKind::kGaussianBinary) return mean;
  return sigmoid(mean);
}

RbmGradient RbmGradient::zeros_like(const RbmLayer& layer) {
  return {Eigen::MatrixXd::Zero(layer.visible_dim(), layer.hidden_dim()),
          Eigen::VectorXd::Zero(layer.visible_dim()),
          Eigen::VectorXd::Zero(layer.hidden_dim())};
}

CdResult cd_update(const Eigen::MatrixXd& batch, const RbmLayer& layer,
                   double alpha, Rng& rng, const CdOptions& options) {
  return contrastive_divergence(batch, layer, alpha, options,
                                [&rng](Eigen::Index) -> Rng& { return rng; });
}

CdResult cd_update_seeded(const Eigen::MatrixXd& batch, const RbmLayer& layer,
                          double alpha, std::span<const std::uint64_t> seeds,
                          const CdOptions& options) {
  if (static_cast<Eigen::Index>(seeds.size()) != batch.rows()) {
    throw DimensionError("cd_update_seeded: need one seed per batch row");
  }
  std::vector<Rng> rngs;
  rngs.reserve(seeds.size());
  for (std::uint64_t s : seeds) rngs.emplace_back(s);
  return contrastive_divergence(
      batch, layer, alpha, options,
      [&rngs](Eigen::Index r) -> Rng& { return rngs[static_cast<std::size_t>(r)]; });
}

RbmGradient cd1_update(const Eigen::MatrixXd& batch, const RbmLayer& layer,
                       double alpha, Rng& rng) {
  CdResult result = cd_update(batch, layer, alpha, rng);
  if (!result.delta.weights.allFinite() || !result.delta.visible_bias.allFinite() ||
      !result.delta.hidden_bias.allFinite()) {
    throw DivergenceError("CD-1 produced a non-finite update");
  }
  return std::move(result.delta);
}

RbmTrainResult train_rbm(const Eigen::MatrixXd& data, RbmLayer layer,
                         const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  layer.validate();
  if (data.rows() == 0) throw ConfigError("train_rbm: no training data");
  if (data.cols() != layer.visible_dim()) {
    throw DimensionError("train_rbm: data has " + std::to_string(data.cols()) +
                         " columns, layer has " +
                         std::to_string(layer.visible_dim()) + " visible units");
  }
  check_binary_range(data, layer);

  const Eigen::Index n = data.rows();
  const double lr = config.learning_rate;
  Rng rng(config.seed);
  RbmGradient velocity = RbmGradient::zeros_like(layer);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  RbmTrainResult result;
  Eigen::MatrixXd batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double momentum = epoch < config.momentum_switch_epoch
                                ? config.initial_momentum
                                : config.final_momentum;
    rng.shuffle(std::span(order));
    double error = 0.0;
    int batch_index = 0;
    for (Eigen::Index begin = 0; begin < n; begin += config.batch_size, ++batch_index) {
      const Eigen::Index size = std::min<Eigen::Index>(config.batch_size, n - begin);
      batch.resize(size, data.cols());
      for (Eigen::Index r = 0; r < size; ++r) {
        batch.row(r) = data.row(order[static_cast<std::size_t>(begin + r)]);
      }
      const CdResult step = cd_update(batch, layer, lr, rng);
      velocity.weights = momentum * velocity.weights + step.delta.weights -
                         lr * config.weight_decay * layer.weights;
      velocity.visible_bias = momentum * velocity.visible_bias + step.delta.visible_bias;
      velocity.hidden_bias = momentum * velocity.hidden_bias + step.delta.hidden_bias;
      layer.weights += velocity.weights;
      layer.visible_bias += velocity.visible_bias;
      layer.hidden_bias += velocity.hidden_bias;
      if (!within_limits(layer.weights) || !within_limits(layer.visible_bias) ||
          !within_limits(layer.hidden_bias) || !std::isfinite(step.reconstruction_error)) {
        throw DivergenceError("RBM training diverged at epoch " +
                              std::to_string(epoch + 1) + ", batch " +
                              std::to_string(batch_index + 1));
      }
      error += step.reconstruction_error;
    }
    result.reconstruction_error.push_back(error / static_cast<double>(n));
    result.weight_norm.push_back(layer.weights.norm());
    if (on_epoch) on_epoch(epoch, result.reconstruction_error.back());
  }
  result.layer = std::move(layer);
  return result;
}

namespace {

void check_enumerable(const RbmLayer& layer) {
  if (layer.kind != LayerKind::kBinaryBinary) {
    throw ConfigError("exact enumeration supports binary-binary layers only");
  }
  layer.validate();
  if (layer.visible_dim() + layer.hidden_dim() > kMaxEnumerationUnits) {
    throw ConfigError("model too large for exact enumeration (" +
                      std::to_string(layer.visible_dim() + layer.hidden_dim()) +
                      " units, limit " + std::to_string(kMaxEnumerationUnits) + ")");
  }
}

Eigen::VectorXd bits(std::uint32_t code, Eigen::Index n) {
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = (code >> i) & 1U ? 1.0 : 0.0;
  return out;
}

void check_binary_data(const Eigen::MatrixXd& data, const RbmLayer& layer) {
  if (data.rows() == 0) throw ConfigError("exact likelihood needs data rows");
  if (data.cols() != layer.visible_dim()) {
    throw DimensionError("data columns do not match visible units");
  }
  if (((data.array() != 0.0) && (data.array() != 1.0)).any()) {
    throw ConfigError("exact likelihood needs binary data");
  }
}

double log_sum_exp(const std::vector<double>& terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double t : terms) hi = std::max(hi, t);
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - hi);
  return hi + std::log(sum);
}

// log sum_h exp(-E(v, h)) by enumerating the hidden states.
double log_unnormalized_marginal(const Eigen::VectorXd& v, const RbmLayer& layer,
                                 const std::vector<Eigen::VectorXd>& hidden_states) {
  const Eigen::VectorXd drive = layer.weights.transpose() * v + layer.hidden_bias;
  const double visible_term = layer.visible_bias.dot(v);
  std::vector<double> terms;
  terms.reserve(hidden_states.size());
  for (const auto& h : hidden_states) terms.push_back(visible_term + drive.dot(h));
  return log_sum_exp(terms);
}

std::vector<Eigen::VectorXd> all_states(Eigen::Index n) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint32_t code = 0; code < (1U << n); ++code) out.push_back(bits(code, n));
  return out;
}

}  // namespace

double log_partition_exact(const RbmLayer& layer) {
  check_enumerable(layer);
  const auto visible_states = all_states(layer.visible_dim());
  const auto hidden_states = all_states(layer.hidden_dim());
  std::vector<double> terms;
  terms.reserve(visible_states.size() * hidden_states.size());
  for (const auto& v : visible_states) {
    for (const auto& h : hidden_states) terms.push_back(-brbm_energy(v, h, layer));
  }
  return log_sum_exp(terms);
}

double log_likelihood_exact(const Eigen::MatrixXd& data, const RbmLayer& layer) {
  check_enumerable(layer);
  check_binary_data(data, layer);
  const double log_z = log_partition_exact(layer);
  const auto hidden_states = all_states(layer.hidden_dim());
  double total = 0.0;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    total += log_unnormalized_marginal(data.row(r).transpose(), layer, hidden_states);
  }
  return total / static_cast<double>(data.rows()) - log_z;
}

RbmGradient exact_gradient(const Eigen::MatrixXd& data, const RbmLayer& layer) {
  check_enumerable(layer);
  check_binary_data(data, layer);
  const auto visible_states = all_states(layer.visible_dim());
  const auto hidden_states = all_states(layer.hidden_dim());

  // Model expectations: every joint state weighted by exp(-E - log Z).
  const double log_z = log_partition_exact(layer);
  RbmGradient model = RbmGradient::zeros_like(layer);
  for (const auto& v : visible_states) {
    for (const auto& h : hidden_states) {
      const double p = std::exp(-brbm_energy(v, h, layer) - log_z);
      model.weights.noalias() += p * v * h.transpose();
      model.visible_bias += p * v;
      model.hidden_bias += p * h;
    }
  }

  // Data expectations: hidden states weighted by P(h | v) for each row.
  RbmGradient observed = RbmGradient::zeros_like(layer);
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    const Eigen::VectorXd v = data.row(r).transpose();
    const double log_marginal = log_unnormalized_marginal(v, layer, hidden_states);
    for (const auto& h : hidden_states) {
      const double p = std::exp(-brbm_energy(v, h, layer) - log_marginal);
      observed.weights.noalias() += p * v * h.transpose();
      observed.hidden_bias += p * h;
    }
    observed.visible_bias += v;
  }
  const double inv_n = 1.0 / static_cast<double>(data.rows());
  return {observed.weights * inv_n - model.weights,
          observed.visible_bias * inv_n - model.visible_bias,
          observed.hidden_bias * inv_n - model.hidden_bias};
}

}  // namespace dar
