// hmm.cc

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

#include "dar/hmm.h"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "dar/error.h"
#include "dar/standardize.h"

namespace dar {
namespace {

void check_sequences(const std::vector<LabelSequence>& sequences, int num_states) {
  if (num_states < 1) throw ConfigError("HMM needs at least one state");
  for (const auto& seq : sequences) {
    for (int y : seq) {
      if (y < 0 || y >= num_states) {
        throw ConfigError("label " + std::to_string(y) + " outside [0, " +
                          std::to_string(num_states) + ")");
      }
    }
  }
}

void check_smoothing(double smoothing) {
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) {
    throw ConfigError("smoothing must be finite and >= 0");
  }
}

void check_scores(const Eigen::MatrixXd& scores, const HmmModel& model) {
  model.validate();
  if (scores.rows() < 1) throw ConfigError("decoding needs at least one time step");
  if (scores.cols() != model.num_states()) {
    throw DimensionError("scores have " + std::to_string(scores.cols()) +
                         " columns, HMM has " + std::to_string(model.num_states()) +
                         " states");
  }
  if (!scores.allFinite() || (scores.array() < 0.0).any()) {
    throw ConfigError("emission scores must be finite and non-negative");
  }
}

double safe_log(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

void check_path(const std::vector<int>& path, const Eigen::MatrixXd& scores,
                const HmmModel& model) {
  check_scores(scores, model);
  if (static_cast<Eigen::Index>(path.size()) != scores.rows()) {
    throw DimensionError("path length " + std::to_string(path.size()) +
                         " does not match " + std::to_string(scores.rows()) +
                         " time steps");
  }
  for (int y : path) {
    if (y < 0 || y >= model.num_states()) throw ConfigError("path state out of range");
  }
}

}  // namespace

void HmmModel::validate() const {
  const Eigen::Index m = prior.size();
  if (m < 1) throw ConfigError("HMM has no states");
  if (transition.rows() != m || transition.cols() != m || class_priors.size() != m ||
      static_cast<Eigen::Index>(class_labels.size()) != m) {
    throw DimensionError("HMM components disagree on the number of states");
  }
  constexpr double kTol = 1e-9;
  if ((prior.array() < 0.0).any() || std::abs(prior.sum() - 1.0) > kTol) {
    throw ConfigError("HMM prior is not a probability vector");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if ((transition.row(i).array() < 0.0).any() ||
        std::abs(transition.row(i).sum() - 1.0) > kTol) {
      throw ConfigError("HMM transition row " + std::to_string(i) +
                        " is not a probability vector");
    }
  }
  if (!(class_priors.array() > 0.0).all()) {
    throw ConfigError("HMM class priors must be strictly positive");
  }
}

Eigen::VectorXd estimate_prior(const std::vector<LabelSequence>& sequences,
                               int num_states, double smoothing) {
  check_sequences(sequences, num_states);
  check_smoothing(smoothing);
  Eigen::VectorXd counts = Eigen::VectorXd::Constant(num_states, smoothing);
  bool any = false;
  for (const auto& seq : sequences) {
    if (seq.empty()) continue;
    counts(seq.front()) += 1.0;
    any = true;
  }
  if (!any) throw ConfigError("prior estimation needs a non-empty sequence");
  return counts / counts.sum();
}

Eigen::MatrixXd estimate_transitions(const std::vector<LabelSequence>& sequences,
                                     int num_states, double smoothing) {
  check_sequences(sequences, num_states);
  check_smoothing(smoothing);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Constant(num_states, num_states, smoothing);
  std::size_t observed = 0;
  for (const auto& seq : sequences) {
    for (std::size_t t = 1; t < seq.size(); ++t) {
      counts(seq[t - 1], seq[t]) += 1.0;
      ++observed;
    }
  }
  if (observed == 0 && smoothing == 0.0) {
    throw ConfigError("no transitions observed and smoothing is zero");
  }
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    const double total = counts.row(i).sum();
    if (total > 0.0) {
      counts.row(i) /= total;
    } else {
      counts.row(i).setConstant(1.0 / num_states);
    }
  }
  return counts;
}

Eigen::VectorXd estimate_class_priors(const std::vector<LabelSequence>& sequences,
                                      int num_states, double smoothing) {
  check_sequences(sequences, num_states);
  check_smoothing(smoothing);
  Eigen::VectorXd counts = Eigen::VectorXd::Constant(num_states, smoothing);
  for (const auto& seq : sequences) {
    for (int y : seq) counts(y) += 1.0;
  }
  if (counts.sum() <= 0.0) throw ConfigError("class prior estimation needs labels");
  return counts / counts.sum();
}

HmmModel estimate_hmm(const std::vector<LabelSequence>& sequences,
                      std::vector<std::string> class_labels, double smoothing) {
  const int m = static_cast<int>(class_labels.size());
  HmmModel model;
  model.prior = estimate_prior(sequences, m, smoothing);
  model.transition = estimate_transitions(sequences, m, smoothing);
  model.class_priors = estimate_class_priors(sequences, m, std::max(smoothing, 1.0));
  model.class_labels = std::move(class_labels);
  model.validate();
  return model;
}

Eigen::MatrixXd emission_scores(const Eigen::MatrixXd& posteriors,
                                const Eigen::VectorXd& class_priors,
                                EmissionScaling scaling) {
  if (posteriors.cols() != class_priors.size()) {
    throw DimensionError("posteriors and class priors disagree on class count");
  }
  if (!(class_priors.array() > 0.0).all()) {
    throw ConfigError("class priors must be strictly positive");
  }
  if ((posteriors.array() < 0.0).any() || !posteriors.allFinite()) {
    throw ConfigError("posteriors must be finite and non-negative");
  }
  Eigen::MatrixXd scores = posteriors;
  if (scaling == EmissionScaling::kScaledLikelihood) {
    scores.array().rowwise() /= class_priors.transpose().array();
  } else {
    scores *= static_cast<double>(class_priors.size());
  }
  return scores;
}

std::vector<int> viterbi(const Eigen::MatrixXd& scores, const HmmModel& model) {
  check_scores(scores, model);
  const Eigen::Index steps = scores.rows();
  const int m = model.num_states();
  for (Eigen::Index t = 0; t < steps; ++t) {
    if ((scores.row(t).array() == 0.0).all()) {
      throw ConfigError("all emission scores are zero at step " + std::to_string(t));
    }
  }
  Eigen::MatrixXd log_trans(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) log_trans(i, j) = safe_log(model.transition(i, j));
  }
  std::vector<double> best(m), next(m);
  std::vector<int> back(static_cast<std::size_t>(steps * m), 0);
  for (int j = 0; j < m; ++j) best[j] = safe_log(model.prior(j)) + safe_log(scores(0, j));
  for (Eigen::Index t = 1; t < steps; ++t) {
    for (int j = 0; j < m; ++j) {
      int arg = 0;
      double hi = best[0] + log_trans(0, j);
      for (int i = 1; i < m; ++i) {
        const double cand = best[i] + log_trans(i, j);
        if (cand > hi) {
          hi = cand;
          arg = i;
        }
      }
      next[j] = hi + safe_log(scores(t, j));
      back[static_cast<std::size_t>(t * m + j)] = arg;
    }
    best.swap(next);
  }
  int state = 0;
  for (int j = 1; j < m; ++j) {
    if (best[j] > best[state]) state = j;
  }
  std::vector<int> path(static_cast<std::size_t>(steps));
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    path[static_cast<std::size_t>(t)] = state;
    if (t > 0) state = back[static_cast<std::size_t>(t * m + state)];
  }
  return path;
}

double joint_log_probability_direct(const std::vector<int>& path,
                                    const Eigen::MatrixXd& scores, const HmmModel& model) {
  check_path(path, scores, model);
  double product = model.prior(path[0]) * scores(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t) {
    product *= model.transition(path[t - 1], path[t]) *
               scores(static_cast<Eigen::Index>(t), path[t]);
  }
  return safe_log(product);
}

double joint_log_probability_recursive(const std::vector<int>& path,
                                       const Eigen::MatrixXd& scores,
                                       const HmmModel& model) {
  check_path(path, scores, model);
  double joint = safe_log(model.prior(path[0])) + safe_log(scores(0, path[0]));
  for (std::size_t t = 1; t < path.size(); ++t) {
    joint += safe_log(model.transition(path[t - 1], path[t])) +
             safe_log(scores(static_cast<Eigen::Index>(t), path[t]));
  }
  return joint;
}

double joint_log_probability(const std::vector<int>& path, const Eigen::MatrixXd& scores,
                             const HmmModel& model) {
  const double recursive = joint_log_probability_recursive(path, scores, model);
  const double direct = joint_log_probability_direct(path, scores, model);
  // The direct product under- or overflows on long paths; compare only when
  // it is representable.
  if (std::isfinite(direct) && std::isfinite(recursive) &&
      std::abs(direct - recursive) > 1e-9 * std::max(1.0, std::abs(recursive))) {
    throw Error("joint probability: direct and recursive forms disagree");
  }
  return recursive;
}

std::vector<std::size_t> segment_boundaries(const std::vector<SpectralFeature>& features) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i == 0 || features[i].origin.user != features[i - 1].origin.user ||
        features[i].origin.recording != features[i - 1].origin.recording) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<int> decode_posteriors(const Eigen::MatrixXd& posteriors, const HmmModel& hmm,
                                   EmissionScaling scaling) {
  return viterbi(emission_scores(posteriors, hmm.class_priors, scaling), hmm);
}

std::vector<SegmentDecode> decode_dataset(const std::vector<SpectralFeature>& features,
                                          const DbnModel& dbn, const HmmModel& hmm,
                                          const std::vector<std::size_t>& boundaries,
                                          EmissionScaling scaling) {
  if (dbn.class_labels != hmm.class_labels) {
    throw ConfigError("DBN and HMM class labels differ in content or order");
  }
  hmm.validate();
  for (std::size_t b = 0; b < boundaries.size(); ++b) {
    if (boundaries[b] >= features.size() || (b > 0 && boundaries[b] <= boundaries[b - 1])) {
      throw ConfigError("segment boundaries must be increasing indices into the features");
    }
  }
  if (!features.empty() && (boundaries.empty() || boundaries.front() != 0)) {
    throw ConfigError("first segment must start at index 0");
  }
  std::vector<SegmentDecode> out;
  for (std::size_t b = 0; b < boundaries.size(); ++b) {
    const std::size_t begin = boundaries[b];
    const std::size_t end = b + 1 < boundaries.size() ? boundaries[b + 1] : features.size();
    std::vector<SpectralFeature> slice(features.begin() + static_cast<std::ptrdiff_t>(begin),
                                       features.begin() + static_cast<std::ptrdiff_t>(end));
    const Eigen::MatrixXd probs = posterior_rows(feature_matrix(slice), dbn);
    SegmentDecode seg;
    seg.user = slice.front().origin.user;
    seg.recording = slice.front().origin.recording;
    for (Eigen::Index t = 0; t < probs.rows(); ++t) {
      const auto& f = slice[static_cast<std::size_t>(t)];
      seg.starts.push_back(f.origin.start);
      seg.truth.push_back(f.label);
      seg.framewise.push_back(argmax(probs.row(t).transpose()));
    }
    seg.viterbi = decode_posteriors(probs, hmm, scaling);
    out.push_back(std::move(seg));
  }
  return out;
}

void save_hmm(const HmmModel& model, const std::string& path) {
  model.validate();
  nlohmann::json j;
  j["format"] = "dar-hmm";
  j["version"] = 1;
  j["class_labels"] = model.class_labels;
  j["prior"] = std::vector<double>(model.prior.data(), model.prior.data() + model.prior.size());
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < model.transition.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index k = 0; k < model.transition.cols(); ++k) row.push_back(model.transition(i, k));
    rows.push_back(std::move(row));
  }
  j["transition"] = rows;
  j["class_priors"] = std::vector<double>(model.class_priors.data(),
                                          model.class_priors.data() + model.class_priors.size());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw InputError("failed writing '" + path + "'");
}

HmmModel load_hmm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("format") != "dar-hmm") throw InputError("'" + path + "' is not an HMM file");
    if (j.at("version") != 1) {
      throw InputError("unsupported HMM file version in '" + path + "'");
    }
    HmmModel model;
    model.class_labels = j.at("class_labels").get<std::vector<std::string>>();
    const auto prior = j.at("prior").get<std::vector<double>>();
    const auto priors = j.at("class_priors").get<std::vector<double>>();
    const auto rows = j.at("transition").get<std::vector<std::vector<double>>>();
    const auto m = static_cast<Eigen::Index>(prior.size());
    model.prior = Eigen::Map<const Eigen::VectorXd>(prior.data(), m);
    model.class_priors =
        Eigen::Map<const Eigen::VectorXd>(priors.data(), static_cast<Eigen::Index>(priors.size()));
    model.transition.resize(static_cast<Eigen::Index>(rows.size()), m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != m) {
        throw InputError("'" + path + "': transition row has wrong length");
      }
      for (Eigen::Index k = 0; k < m; ++k) model.transition(static_cast<Eigen::Index>(i), k) = rows[i][k];
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

}  // namespace dar
