// dar/metrics.h

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

#ifndef DAR_METRICS_H_
#define DAR_METRICS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dar {

/// Counts of (true, predicted) class pairs; rows are true classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> class_labels);

  /// Throws ConfigError for indices outside the class set.
  void add(int truth, int predicted);
  /// Adds another matrix over the same classes (partial results merge
  /// associatively).
  void merge(const ConfusionMatrix& other);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::int64_t count(int truth, int predicted) const;
  std::int64_t total() const { return total_; }

  std::int64_t true_positives(int c) const;
  std::int64_t false_positives(int c) const;
  std::int64_t false_negatives(int c) const;
  std::int64_t true_negatives(int c) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

ConfusionMatrix confusion(const std::vector<std::pair<int, int>>& pairs,
                          std::vector<std::string> class_labels);

/// Ratios whose denominator is zero are std::nullopt ("not applicable").
struct BinaryMetrics {
  std::optional<double> tpr;
  std::optional<double> tnr;
  std::optional<double> acc;
};

/// Sensitivity, specificity and accuracy of a two-class matrix, with
/// `positive` naming the positive class index.
BinaryMetrics binary_metrics(const ConfusionMatrix& cm, int positive);

/// Mean over classes of the one-vs-rest accuracy
/// (TP_i + TN_i) / (TP_i + TN_i + FP_i + FN_i). This is not the plain hit
/// rate; both are reported.
double multiclass_accuracy(const ConfusionMatrix& cm);

/// Fraction of correct predictions (trace / total).
std::optional<double> hit_rate(const ConfusionMatrix& cm);

std::optional<double> precision(const ConfusionMatrix& cm, int c);
std::optional<double> recall(const ConfusionMatrix& cm, int c);

/// Plain-text report: matrix, per-class precision/recall, macro ACC, hit
/// rate, and TPR/TNR/ACC when `positive` is given for a two-class task.
std::string metrics_report(const ConfusionMatrix& cm, std::optional<int> positive = {});

}  // namespace dar

#endif  // DAR_METRICS_H_
