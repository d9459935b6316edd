// dbn.cc

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

#include "dar/dbn.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "dar/error.h"

namespace dar {
namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

void check_labels(const std::vector<int>& labels, Eigen::Index rows, int classes) {
  if (static_cast<Eigen::Index>(labels.size()) != rows) {
    throw DimensionError("label count " + std::to_string(labels.size()) +
                         " does not match " + std::to_string(rows) + " rows");
  }
  for (int y : labels) {
    if (y < 0 || y >= classes) {
      throw ConfigError("label index " + std::to_string(y) + " outside [0, " +
                        std::to_string(classes) + ")");
    }
  }
}

void check_input(const Eigen::MatrixXd& x, const DbnModel& model) {
  if (x.cols() != model.input_dim()) {
    throw DimensionError("input length " + std::to_string(x.cols()) +
                         " does not match model input length " +
                         std::to_string(model.input_dim()));
  }
}

void require_head(const DbnModel& model) {
  if (!model.head_initialized) throw ConfigError("model head is not initialized");
}

// Row-wise softmax in place.
void softmax_rows(Eigen::MatrixXd& logits) {
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double hi = logits.row(r).maxCoeff();
    logits.row(r) = (logits.row(r).array() - hi).exp().matrix();
    logits.row(r) /= logits.row(r).sum();
  }
}

// Activations of every layer for a batch; element 0 is the input.
std::vector<Eigen::MatrixXd> activations(const Eigen::MatrixXd& x, const DbnModel& model) {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(model.layers.size() + 1);
  acts.push_back(x);
  for (const auto& layer : model.layers) {
    Eigen::MatrixXd pre = acts.back() * layer.weights;
    pre.rowwise() += layer.hidden_bias.transpose();
    acts.push_back(sigmoid(pre));
  }
  return acts;
}

Eigen::MatrixXd head_logits(const Eigen::MatrixXd& top, const DbnModel& model) {
  Eigen::MatrixXd logits = top * model.head_weights;
  logits.rowwise() += model.head_bias.transpose();
  return logits;
}

// Cross-entropy gradient for a batch, plus the batch's summed loss and hit
// count computed from the same forward pass.
struct BatchGradient {
  DbnGradient gradient;
  double loss_sum = 0.0;
  int hits = 0;
};

BatchGradient batch_gradient(const DbnModel& model, const Eigen::MatrixXd& x,
                             const std::vector<int>& labels) {
  const auto acts = activations(x, model);
  Eigen::MatrixXd probs = head_logits(acts.back(), model);
  softmax_rows(probs);
  const Eigen::Index rows = x.rows();
  BatchGradient out;
  Eigen::MatrixXd delta = probs;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const int y = labels[static_cast<std::size_t>(r)];
    out.loss_sum -= std::log(std::max(probs(r, y), std::numeric_limits<double>::min()));
    Eigen::Index best = 0;
    probs.row(r).maxCoeff(&best);
    if (best == y) ++out.hits;
    delta(r, y) -= 1.0;
  }
  delta /= static_cast<double>(rows);

  DbnGradient& g = out.gradient;
  g.head_weights = acts.back().transpose() * delta;
  g.head_bias = delta.colwise().sum().transpose();
  Eigen::MatrixXd upstream = delta * model.head_weights.transpose();
  const std::size_t depth = model.layers.size();
  g.weights.resize(depth);
  g.hidden_bias.resize(depth);
  for (std::size_t k = depth; k-- > 0;) {
    const Eigen::MatrixXd& a = acts[k + 1];
    const Eigen::MatrixXd pre_grad =
        (upstream.array() * a.array() * (1.0 - a.array())).matrix();
    g.weights[k] = acts[k].transpose() * pre_grad;
    g.hidden_bias[k] = pre_grad.colwise().sum().transpose();
    if (k > 0) upstream = pre_grad * model.layers[k].weights.transpose();
  }
  return out;
}

bool finite_model(const DbnModel& model) {
  for (const auto& layer : model.layers) {
    if (!layer.weights.allFinite() || !layer.hidden_bias.allFinite()) return false;
  }
  return model.head_weights.allFinite() && model.head_bias.allFinite();
}

}  // namespace

std::vector<int> DbnModel::widths() const {
  std::vector<int> out;
  for (const auto& layer : layers) out.push_back(static_cast<int>(layer.hidden_dim()));
  return out;
}

void DbnModel::validate() const {
  if (layers.empty()) throw ConfigError("DBN has no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    layers[k].validate();
    const bool first = k == 0;
    if (!first && layers[k].kind == LayerKind::kGaussianBinary) {
      throw ConfigError("gaussian-binary layer is only allowed first in a stack");
    }
    if (!first && layers[k].visible_dim() != layers[k - 1].hidden_dim()) {
      throw DimensionError("layer " + std::to_string(k) + " has " +
                           std::to_string(layers[k].visible_dim()) +
                           " visible units but layer below has " +
                           std::to_string(layers[k - 1].hidden_dim()) + " hidden units");
    }
  }
  if (head_initialized) {
    if (head_weights.rows() != layers.back().hidden_dim() ||
        head_weights.cols() != num_classes() || head_bias.size() != num_classes()) {
      throw DimensionError("softmax head shape does not match the stack");
    }
  }
}

void DbnModel::init_head(std::vector<std::string> labels) {
  if (layers.empty()) throw ConfigError("cannot add a head to an empty DBN");
  if (labels.size() < 1) throw ConfigError("head needs at least one class");
  class_labels = std::move(labels);
  head_weights = Eigen::MatrixXd::Zero(layers.back().hidden_dim(), num_classes());
  head_bias = Eigen::VectorXd::Zero(num_classes());
  head_initialized = true;
}

DbnModel random_dbn(Eigen::Index input_dim, const std::vector<int>& layer_dims,
                    std::uint64_t seed) {
  if (layer_dims.empty()) throw ConfigError("layer_dims must not be empty");
  Rng rng(seed);
  DbnModel model;
  Eigen::Index visible = input_dim;
  for (std::size_t k = 0; k < layer_dims.size(); ++k) {
    const LayerKind kind = k == 0 ? LayerKind::kGaussianBinary : LayerKind::kBinaryBinary;
    model.layers.push_back(RbmLayer::random(kind, visible, layer_dims[k], rng));
    visible = layer_dims[k];
  }
  return model;
}

PretrainResult pretrain_greedy(
    const Eigen::MatrixXd& features, const std::vector<int>& layer_dims,
    const std::vector<TrainConfig>& configs,
    const std::function<void(int layer, int epoch, double error)>& on_epoch) {
  if (layer_dims.empty()) throw ConfigError("layer_dims must not be empty");
  if (configs.size() != layer_dims.size()) {
    throw ConfigError("pretraining needs one TrainConfig per layer");
  }
  if (features.rows() == 0) throw ConfigError("pretraining needs at least one feature");
  PretrainResult result;
  Eigen::MatrixXd input = features;
  for (std::size_t k = 0; k < layer_dims.size(); ++k) {
    const LayerKind kind = k == 0 ? LayerKind::kGaussianBinary : LayerKind::kBinaryBinary;
    Rng init_rng(derive_seed(configs[k].seed, 0x1a7e));
    RbmLayer init = RbmLayer::random(kind, input.cols(), layer_dims[k], init_rng);
    EpochCallback hook;
    if (on_epoch) {
      hook = [&on_epoch, k](int epoch, double error) {
        on_epoch(static_cast<int>(k), epoch, error);
      };
    }
    RbmTrainResult trained = train_rbm(input, std::move(init), configs[k], hook);
    if (k + 1 < layer_dims.size()) input = hidden_conditional_rows(input, trained.layer);
    result.reconstruction_error.push_back(std::move(trained.reconstruction_error));
    result.model.layers.push_back(std::move(trained.layer));
  }
  return result;
}

std::vector<Eigen::VectorXd> forward(const Eigen::VectorXd& x, const DbnModel& model) {
  if (x.size() != model.input_dim()) {
    throw DimensionError("input length " + std::to_string(x.size()) +
                         " does not match model input length " +
                         std::to_string(model.input_dim()));
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(model.layers.size());
  Eigen::VectorXd a = x;
  for (const auto& layer : model.layers) {
    a = hidden_conditional(a, layer);
    out.push_back(a);
  }
  return out;
}

Eigen::MatrixXd forward_top_rows(const Eigen::MatrixXd& x, const DbnModel& model) {
  check_input(x, model);
  return activations(x, model).back();
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double hi = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - hi).exp().matrix();
  return e / e.sum();
}

Eigen::VectorXd posterior(const Eigen::VectorXd& x, const DbnModel& model) {
  require_head(model);
  const auto acts = forward(x, model);
  return softmax(model.head_weights.transpose() * acts.back() + model.head_bias);
}

Eigen::MatrixXd posterior_rows(const Eigen::MatrixXd& x, const DbnModel& model) {
  require_head(model);
  Eigen::MatrixXd probs = head_logits(forward_top_rows(x, model), model);
  softmax_rows(probs);
  return probs;
}

int argmax(const Eigen::VectorXd& values) {
  if (values.size() == 0) throw DimensionError("argmax of an empty vector");
  int best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = static_cast<int>(i);
  }
  return best;
}

int predict(const Eigen::VectorXd& x, const DbnModel& model) {
  return argmax(posterior(x, model));
}

std::vector<int> predict_rows(const Eigen::MatrixXd& x, const DbnModel& model) {
  const Eigen::MatrixXd probs = posterior_rows(x, model);
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    out[static_cast<std::size_t>(r)] = argmax(probs.row(r).transpose());
  }
  return out;
}

void FineTuneConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("fine-tuning learning rate must be finite and >= 0");
  }
  if (epochs < 1) throw ConfigError("fine-tuning epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("fine-tuning batch size must be >= 1");
  if (patience < 0) throw ConfigError("patience must be >= 0");
}

double cross_entropy(const DbnModel& model, const Eigen::MatrixXd& x,
                     const std::vector<int>& labels) {
  require_head(model);
  check_input(x, model);
  check_labels(labels, x.rows(), model.num_classes());
  if (x.rows() == 0) throw ConfigError("cross entropy of an empty set");
  const Eigen::MatrixXd probs = posterior_rows(x, model);
  double total = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    total -= std::log(probs(r, labels[static_cast<std::size_t>(r)]));
  }
  return total / static_cast<double>(x.rows());
}

DbnGradient loss_gradient(const DbnModel& model, const Eigen::MatrixXd& x,
                          const std::vector<int>& labels) {
  require_head(model);
  check_input(x, model);
  check_labels(labels, x.rows(), model.num_classes());
  if (x.rows() == 0) throw ConfigError("gradient of an empty set");
  return batch_gradient(model, x, labels).gradient;
}

double hit_rate(const DbnModel& model, const Eigen::MatrixXd& x,
                const std::vector<int>& labels) {
  check_labels(labels, x.rows(), model.num_classes());
  if (x.rows() == 0) throw ConfigError("hit rate of an empty set");
  const auto predicted = predict_rows(x, model);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

FineTuneResult fine_tune(DbnModel model, const Eigen::MatrixXd& x,
                         const std::vector<int>& labels,
                         const FineTuneConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  model.validate();
  require_head(model);
  check_input(x, model);
  check_labels(labels, x.rows(), model.num_classes());
  if (x.rows() == 0) throw ConfigError("fine-tuning needs labeled data");

  const Eigen::Index n = x.rows();
  const double lr = config.learning_rate;
  Rng rng(config.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  FineTuneResult result;
  double best_loss = std::numeric_limits<double>::infinity();
  int stale = 0;
  Eigen::MatrixXd batch;
  std::vector<int> batch_labels;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double loss_sum = 0.0;
    long hits = 0;
    for (Eigen::Index begin = 0; begin < n; begin += config.batch_size) {
      const Eigen::Index size = std::min<Eigen::Index>(config.batch_size, n - begin);
      batch.resize(size, x.cols());
      batch_labels.resize(static_cast<std::size_t>(size));
      for (Eigen::Index r = 0; r < size; ++r) {
        const Eigen::Index src = order[static_cast<std::size_t>(begin + r)];
        batch.row(r) = x.row(src);
        batch_labels[static_cast<std::size_t>(r)] = labels[static_cast<std::size_t>(src)];
      }
      const BatchGradient step = batch_gradient(model, batch, batch_labels);
      loss_sum += step.loss_sum;
      hits += step.hits;
      if (lr == 0.0) continue;
      for (std::size_t k = 0; k < model.layers.size(); ++k) {
        model.layers[k].weights -= lr * step.gradient.weights[k];
        model.layers[k].hidden_bias -= lr * step.gradient.hidden_bias[k];
      }
      model.head_weights -= lr * step.gradient.head_weights;
      model.head_bias -= lr * step.gradient.head_bias;
    }
    const double loss = loss_sum / static_cast<double>(n);
    if (!std::isfinite(loss) || !finite_model(model)) {
      throw DivergenceError("fine-tuning diverged at epoch " + std::to_string(epoch + 1));
    }
    result.loss.push_back(loss);
    result.accuracy.push_back(static_cast<double>(hits) / static_cast<double>(n));
    if (on_epoch) on_epoch(epoch, loss);
    if (config.patience > 0) {
      if (loss < best_loss) {
        best_loss = loss;
        stale = 0;
      } else if (++stale >= config.patience) {
        break;
      }
    }
  }
  result.model = std::move(model);
  return result;
}

TrainOutcome train_dbn(const Eigen::MatrixXd& pretrain_x, const Eigen::MatrixXd& train_x,
                       const std::vector<int>& train_y,
                       const std::vector<std::string>& class_labels,
                       const std::vector<int>& layer_dims, const SweepConfig& config,
                       std::uint64_t seed) {
  TrainOutcome out;
  DbnModel model;
  if (config.pretrain) {
    std::vector<TrainConfig> configs;
    for (std::size_t k = 0; k < layer_dims.size(); ++k) {
      TrainConfig cfg = k == 0 ? config.first_layer : config.upper_layers;
      cfg.seed = derive_seed(seed, 100 + k);
      configs.push_back(cfg);
    }
    std::function<void(int, int, double)> hook;
    if (config.on_epoch) {
      hook = [&config](int layer, int epoch, double error) {
        config.on_epoch("pretrain", layer, epoch, error);
      };
    }
    PretrainResult pre = pretrain_greedy(pretrain_x, layer_dims, configs, hook);
    model = std::move(pre.model);
    out.reconstruction_error = std::move(pre.reconstruction_error);
  } else {
    model = random_dbn(train_x.cols(), layer_dims, derive_seed(seed, 1));
  }
  model.init_head(class_labels);
  FineTuneConfig ft = config.fine_tune;
  ft.seed = derive_seed(seed, 2);
  EpochCallback hook;
  if (config.on_epoch) {
    hook = [&config](int epoch, double loss) { config.on_epoch("finetune", -1, epoch, loss); };
  }
  FineTuneResult tuned = fine_tune(std::move(model), train_x, train_y, ft, hook);
  out.model = std::move(tuned.model);
  out.loss = std::move(tuned.loss);
  out.accuracy = std::move(tuned.accuracy);
  return out;
}

std::vector<SweepCell> evaluate_structure_sweep(const SweepData& data,
                                                const std::vector<int>& depth_grid,
                                                const std::vector<int>& width_grid,
                                                const SweepConfig& config) {
  if (depth_grid.empty() || width_grid.empty()) {
    throw ConfigError("sweep grids must not be empty");
  }
  std::vector<SweepCell> cells;
  std::uint64_t cell_index = 0;
  for (int depth : depth_grid) {
    for (int width : width_grid) {
      if (depth < 1 || width < 1) throw ConfigError("sweep depth and width must be >= 1");
      const std::vector<int> dims(static_cast<std::size_t>(depth), width);
      const TrainOutcome trained =
          train_dbn(data.pretrain_x, data.train_x, data.train_y, data.class_labels, dims,
                    config, derive_seed(config.master_seed, cell_index++));
      SweepCell cell;
      cell.depth = depth;
      cell.width = width;
      cell.train_accuracy = hit_rate(trained.model, data.train_x, data.train_y);
      cell.test_accuracy = hit_rate(trained.model, data.test_x, data.test_y);
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace dar
