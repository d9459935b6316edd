// metrics.cc

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

#include "dar/metrics.h"

#include <iomanip>
#include <sstream>

#include "dar/error.h"

namespace dar {
namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string format(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << *v;
  return out.str();
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_labels)
    : labels_(std::move(class_labels)), counts_(labels_.size() * labels_.size(), 0) {}

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth < 0 || truth >= size() || predicted < 0 || predicted >= size()) {
    throw ConfigError("confusion: label pair (" + std::to_string(truth) + ", " +
                      std::to_string(predicted) + ") outside the " +
                      std::to_string(size()) + "-class set");
  }
  ++counts_[static_cast<std::size_t>(truth * size() + predicted)];
  ++total_;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.labels_ != labels_) {
    throw ConfigError("cannot merge confusion matrices over different classes");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

std::int64_t ConfusionMatrix::count(int truth, int predicted) const {
  return counts_.at(static_cast<std::size_t>(truth * size() + predicted));
}

std::int64_t ConfusionMatrix::true_positives(int c) const { return count(c, c); }

std::int64_t ConfusionMatrix::false_positives(int c) const {
  std::int64_t sum = 0;
  for (int t = 0; t < size(); ++t) {
    if (t != c) sum += count(t, c);
  }
  return sum;
}

std::int64_t ConfusionMatrix::false_negatives(int c) const {
  std::int64_t sum = 0;
  for (int p = 0; p < size(); ++p) {
    if (p != c) sum += count(c, p);
  }
  return sum;
}

std::int64_t ConfusionMatrix::true_negatives(int c) const {
  return total_ - true_positives(c) - false_positives(c) - false_negatives(c);
}

ConfusionMatrix confusion(const std::vector<std::pair<int, int>>& pairs,
                          std::vector<std::string> class_labels) {
  ConfusionMatrix cm(std::move(class_labels));
  for (const auto& [truth, predicted] : pairs) cm.add(truth, predicted);
  return cm;
}

BinaryMetrics binary_metrics(const ConfusionMatrix& cm, int positive) {
  if (cm.size() != 2) {
    throw ConfigError("binary metrics need exactly 2 classes, got " +
                      std::to_string(cm.size()));
  }
  if (positive != 0 && positive != 1) throw ConfigError("positive class must be 0 or 1");
  const std::int64_t tp = cm.true_positives(positive);
  const std::int64_t fn = cm.false_negatives(positive);
  const std::int64_t fp = cm.false_positives(positive);
  const std::int64_t tn = cm.true_negatives(positive);
  return {ratio(tp, tp + fn), ratio(tn, tn + fp), ratio(tp + tn, tp + tn + fp + fn)};
}

double multiclass_accuracy(const ConfusionMatrix& cm) {
  if (cm.size() < 2) throw ConfigError("multiclass accuracy needs at least 2 classes");
  if (cm.total() == 0) throw ConfigError("multiclass accuracy of an empty matrix");
  double sum = 0.0;
  for (int c = 0; c < cm.size(); ++c) {
    sum += static_cast<double>(cm.true_positives(c) + cm.true_negatives(c)) /
           static_cast<double>(cm.total());
  }
  return sum / cm.size();
}

std::optional<double> hit_rate(const ConfusionMatrix& cm) {
  std::int64_t hits = 0;
  for (int c = 0; c < cm.size(); ++c) hits += cm.count(c, c);
  return ratio(hits, cm.total());
}

std::optional<double> precision(const ConfusionMatrix& cm, int c) {
  return ratio(cm.true_positives(c), cm.true_positives(c) + cm.false_positives(c));
}

std::optional<double> recall(const ConfusionMatrix& cm, int c) {
  return ratio(cm.true_positives(c), cm.true_positives(c) + cm.false_negatives(c));
}

std::string metrics_report(const ConfusionMatrix& cm, std::optional<int> positive) {
  std::ostringstream out;
  out << "windows " << cm.total() << "\n";
  out << "confusion (rows = true, columns = predicted)\n";
  std::size_t width = 6;
  for (const auto& l : cm.labels()) width = std::max(width, l.size() + 1);
  out << std::setw(static_cast<int>(width)) << "";
  for (const auto& l : cm.labels()) out << std::setw(static_cast<int>(width)) << l;
  out << "\n";
  for (int t = 0; t < cm.size(); ++t) {
    out << std::setw(static_cast<int>(width)) << cm.labels()[t];
    for (int p = 0; p < cm.size(); ++p) {
      out << std::setw(static_cast<int>(width)) << cm.count(t, p);
    }
    out << "\n";
  }
  out << "per-class\n";
  for (int c = 0; c < cm.size(); ++c) {
    out << "  " << cm.labels()[c] << " precision " << format(precision(cm, c))
        << " recall " << format(recall(cm, c)) << "\n";
  }
  std::optional<double> macro;
  if (cm.size() >= 2 && cm.total() > 0) macro = multiclass_accuracy(cm);
  out << "macro_acc " << format(macro) << "\n";
  out << "hit_rate " << format(hit_rate(cm)) << "\n";
  if (positive && cm.size() == 2) {
    const BinaryMetrics b = binary_metrics(cm, *positive);
    out << "positive_class " << cm.labels()[*positive] << "\n";
    out << "tpr " << format(b.tpr) << "\n";
    out << "tnr " << format(b.tnr) << "\n";
    out << "acc " << format(b.acc) << "\n";
  }
  return out.str();
}

}  // namespace dar
