// dar/standardize.h

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

#ifndef DAR_STANDARDIZE_H_
#define DAR_STANDARDIZE_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dar/spectral.h"

namespace dar {

/// Per-feature centering and scaling fitted on a training set. Variance uses
/// the population (1/n) definition, so the fit set maps to exactly zero mean
/// and unit variance.
class Standardizer {
 public:
  static constexpr double kScaleFloor = 1e-8;

  Standardizer() = default;
  Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale);

  /// Rows of `data` are samples.
  static Standardizer fit(const Eigen::MatrixXd& data);
  static Standardizer fit(const std::vector<SpectralFeature>& features);

  Eigen::Index dim() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& scale() const { return scale_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  SpectralFeature apply(const SpectralFeature& feature) const;
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& data) const;
  Eigen::VectorXd invert(const Eigen::VectorXd& z) const;

  void save(const std::string& path) const;
  static Standardizer load(const std::string& path);

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
};

/// Stacks feature vectors as matrix rows.
Eigen::MatrixXd feature_matrix(const std::vector<SpectralFeature>& features);

}  // namespace dar

#endif  // DAR_STANDARDIZE_H_
