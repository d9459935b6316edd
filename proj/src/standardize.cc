// standardize.cc

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

#include "dar/standardize.h"

#include <fstream>
#include <iomanip>
#include <limits>

#include "dar/error.h"

namespace dar {

Standardizer::Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
  if (mean_.size() != scale_.size()) {
    throw DimensionError("standardizer mean and scale differ in length");
  }
  if ((scale_.array() <= 0.0).any()) {
    throw ConfigError("standardizer scale entries must be positive");
  }
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& data) {
  if (data.rows() == 0) throw ConfigError("cannot fit standardizer on empty set");
  const double n = static_cast<double>(data.rows());
  Eigen::VectorXd mean = data.colwise().sum().transpose() / n;
  Eigen::VectorXd scale(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const double var = (data.col(j).array() - mean(j)).square().sum() / n;
    scale(j) = std::max(std::sqrt(var), kScaleFloor);
  }
  return Standardizer(std::move(mean), std::move(scale));
}

Standardizer Standardizer::fit(const std::vector<SpectralFeature>& features) {
  if (features.empty()) throw ConfigError("cannot fit standardizer on empty set");
  return fit(feature_matrix(features));
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& x) const {
  if (x.size() != mean_.size()) {
    throw DimensionError("feature length " + std::to_string(x.size()) +
                         " does not match standardizer length " +
                         std::to_string(mean_.size()));
  }
  return ((x - mean_).array() / scale_.array()).matrix();
}

SpectralFeature Standardizer::apply(const SpectralFeature& feature) const {
  SpectralFeature out = feature;
  out.values = apply(feature.values);
  return out;
}

Eigen::MatrixXd Standardizer::apply_rows(const Eigen::MatrixXd& data) const {
  if (data.cols() != mean_.size()) {
    throw DimensionError("feature length " + std::to_string(data.cols()) +
                         " does not match standardizer length " +
                         std::to_string(mean_.size()));
  }
  Eigen::MatrixXd out = data.rowwise() - mean_.transpose();
  out.array().rowwise() /= scale_.transpose().array();
  return out;
}

Eigen::VectorXd Standardizer::invert(const Eigen::VectorXd& z) const {
  if (z.size() != mean_.size()) throw DimensionError("length mismatch in invert");
  return (z.array() * scale_.array()).matrix() + mean_;
}

void Standardizer::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "dar-standardizer 1 " << mean_.size() << "\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < mean_.size(); ++i) {
    out << mean_(i) << ' ' << scale_(i) << '\n';
  }
  if (!out) throw InputError("failed writing '" + path + "'");
}

Standardizer Standardizer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string magic;
  int version = 0;
  Eigen::Index n = 0;
  if (!(in >> magic >> version >> n) || magic != "dar-standardizer") {
    throw InputError("'" + path + "' is not a standardizer file");
  }
  if (version != 1) {
    throw InputError("unsupported standardizer version " + std::to_string(version));
  }
  Eigen::VectorXd mean(n), scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(in >> mean(i) >> scale(i))) {
      throw InputError("'" + path + "' is truncated");
    }
  }
  return Standardizer(std::move(mean), std::move(scale));
}

Eigen::MatrixXd feature_matrix(const std::vector<SpectralFeature>& features) {
  if (features.empty()) return {};
  const Eigen::Index dim = features.front().values.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(features.size()), dim);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].values.size() != dim) {
      throw DimensionError("features have inconsistent lengths");
    }
    out.row(static_cast<Eigen::Index>(i)) = features[i].values.transpose();
  }
  return out;
}

}  // namespace dar
