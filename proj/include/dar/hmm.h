// dar/hmm.h

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

#ifndef DAR_HMM_H_
#define DAR_HMM_H_

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dar/dbn.h"
#include "dar/spectral.h"

namespace dar {

/// Log-space representation of probability zero.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// First-order activity HMM. `transition(i, j)` = P(y_t = j | y_{t-1} = i).
/// Emissions come from DBN posteriors at decode time; `class_priors` holds
/// the empirical P(a_i) that turns posteriors into scaled likelihoods.
struct HmmModel {
  Eigen::VectorXd prior;
  Eigen::MatrixXd transition;
  std::vector<std::string> class_labels;
  Eigen::VectorXd class_priors;

  int num_states() const { return static_cast<int>(prior.size()); }
  void validate() const;
};

using LabelSequence = std::vector<int>;

/// (count of first labels + eps) / (sequences + M eps).
Eigen::VectorXd estimate_prior(const std::vector<LabelSequence>& sequences,
                               int num_states, double smoothing);

/// Row-normalized smoothed bigram counts. With zero smoothing, a state that is
/// never left gets a uniform row; no observed transition at all is an error.
Eigen::MatrixXd estimate_transitions(const std::vector<LabelSequence>& sequences,
                                     int num_states, double smoothing);

/// Smoothed relative frequency of every label in the sequences.
Eigen::VectorXd estimate_class_priors(const std::vector<LabelSequence>& sequences,
                                      int num_states, double smoothing);

/// All three estimates; class priors are always smoothed with at least 1 so
/// they stay strictly positive.
HmmModel estimate_hmm(const std::vector<LabelSequence>& sequences,
                      std::vector<std::string> class_labels, double smoothing);

enum class EmissionScaling { kScaledLikelihood, kUniformPrior };

/// score_i(t) = P(a_i | x_t) / P(a_i). Rows are time steps. Uniform-prior
/// scaling divides by 1/M instead.
Eigen::MatrixXd emission_scores(const Eigen::MatrixXd& posteriors,
                                const Eigen::VectorXd& class_priors,
                                EmissionScaling scaling = EmissionScaling::kScaledLikelihood);

/// Most probable state path for T x M emission scores, by log-space dynamic
/// programming in O(M^2 T). Ties go to the lower state index.
std::vector<int> viterbi(const Eigen::MatrixXd& scores, const HmmModel& model);

/// log[ pi(y_1) s_1(y_1) prod_t psi(y_t | y_{t-1}) s_t(y_t) ] as one product.
double joint_log_probability_direct(const std::vector<int>& path,
                                    const Eigen::MatrixXd& scores, const HmmModel& model);
/// Same quantity through the recursion J_t = J_{t-1} psi(y_t | y_{t-1}) s_t(y_t).
double joint_log_probability_recursive(const std::vector<int>& path,
                                       const Eigen::MatrixXd& scores,
                                       const HmmModel& model);
/// Recursive value, cross-checked against the direct product whenever the
/// latter is representable. Returns kLogZero for impossible paths.
double joint_log_probability(const std::vector<int>& path, const Eigen::MatrixXd& scores,
                             const HmmModel& model);

/// Indices where a new (user, recording) segment begins.
std::vector<std::size_t> segment_boundaries(const std::vector<SpectralFeature>& features);

struct SegmentDecode {
  std::string user;
  std::string recording;
  std::vector<std::int64_t> starts;
  std::vector<int> truth;
  std::vector<int> framewise;
  std::vector<int> viterbi;
};

/// Decodes each segment independently. `features` must already be
/// standardized for `dbn`; `boundaries` as returned by segment_boundaries.
std::vector<SegmentDecode> decode_dataset(
    const std::vector<SpectralFeature>& features, const DbnModel& dbn,
    const HmmModel& hmm, const std::vector<std::size_t>& boundaries,
    EmissionScaling scaling = EmissionScaling::kScaledLikelihood);

/// Decoding core shared with the synthetic benchmarks: posteriors (T x M) in,
/// Viterbi path out.
std::vector<int> decode_posteriors(const Eigen::MatrixXd& posteriors, const HmmModel& hmm,
                                   EmissionScaling scaling = EmissionScaling::kScaledLikelihood);

void save_hmm(const HmmModel& model, const std::string& path);
HmmModel load_hmm(const std::string& path);

}  // namespace dar

#endif  // DAR_HMM_H_
