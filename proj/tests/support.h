// support.h

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

#ifndef DAR_TESTS_SUPPORT_H_
#define DAR_TESTS_SUPPORT_H_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <unistd.h>
#include <string>
#include <vector>

#include "dar/random.h"
#include "dar/rbm.h"

namespace dar::testing {

inline std::string data_path(const std::string& name) {
  return std::string(DAR_TEST_DATA) + "/" + name;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("dar-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Bit pattern `bits` as a 0/1 vector of length n, bit i -> entry i.
inline Eigen::VectorXd binary_state(std::uint64_t bits, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = static_cast<double>((bits >> i) & 1u);
  return v;
}

// Independent energy of a binary-binary RBM: -b'v - c'h - v'Wh.
inline double oracle_energy(const Eigen::VectorXd& v, const Eigen::VectorXd& h,
                            const RbmLayer& l) {
  return -l.visible_bias.dot(v) - l.hidden_bias.dot(h) - v.dot(l.weights * h);
}

// P(h_j = 1 | v) by summing Boltzmann weights over every hidden state.
inline Eigen::VectorXd oracle_hidden(const Eigen::VectorXd& v, const RbmLayer& l) {
  const int nh = static_cast<int>(l.hidden_bias.size());
  Eigen::VectorXd on = Eigen::VectorXd::Zero(nh);
  double total = 0.0;
  for (std::uint64_t s = 0; s < (1ull << nh); ++s) {
    const Eigen::VectorXd h = binary_state(s, nh);
    const double w = std::exp(-oracle_energy(v, h, l));
    total += w;
    on += w * h;
  }
  return on / total;
}

// P(v_i = 1 | h) by summing over every visible state.
inline Eigen::VectorXd oracle_visible(const Eigen::VectorXd& h, const RbmLayer& l) {
  const int nv = static_cast<int>(l.visible_bias.size());
  Eigen::VectorXd on = Eigen::VectorXd::Zero(nv);
  double total = 0.0;
  for (std::uint64_t s = 0; s < (1ull << nv); ++s) {
    const Eigen::VectorXd v = binary_state(s, nv);
    const double w = std::exp(-oracle_energy(v, h, l));
    total += w;
    on += w * v;
  }
  return on / total;
}

inline RbmLayer random_layer(LayerKind kind, int nv, int nh, Rng& rng, double scale) {
  RbmLayer l = RbmLayer::zeros(kind, nv, nh);
  for (int i = 0; i < nv; ++i) {
    l.visible_bias(i) = scale * (2.0 * rng.uniform() - 1.0);
    for (int j = 0; j < nh; ++j) l.weights(i, j) = scale * (2.0 * rng.uniform() - 1.0);
  }
  for (int j = 0; j < nh; ++j) l.hidden_bias(j) = scale * (2.0 * rng.uniform() - 1.0);
  return l;
}

// Draws v from a binary RBM's marginal by inverting the enumerated CDF.
class ExactSampler {
 public:
  explicit ExactSampler(const RbmLayer& l) : nv_(static_cast<int>(l.visible_bias.size())) {
    const int nh = static_cast<int>(l.hidden_bias.size());
    double acc = 0.0;
    for (std::uint64_t s = 0; s < (1ull << nv_); ++s) {
      const Eigen::VectorXd v = binary_state(s, nv_);
      double p = 0.0;
      for (std::uint64_t t = 0; t < (1ull << nh); ++t) {
        p += std::exp(-oracle_energy(v, binary_state(t, nh), l));
      }
      acc += p;
      cdf_.push_back(acc);
    }
    for (double& c : cdf_) c /= acc;
  }
  Eigen::VectorXd draw(Rng& rng) const {
    const double u = rng.uniform();
    std::uint64_t s = 0;
    while (s + 1 < cdf_.size() && cdf_[s] <= u) ++s;
    return binary_state(s, nv_);
  }

 private:
  int nv_;
  std::vector<double> cdf_;
};

}  // namespace dar::testing

#endif  // DAR_TESTS_SUPPORT_H_
