// test_metrics.cc

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

#include <doctest.h>

#include <string>
#include <vector>

#include "dar/error.h"
#include "dar/metrics.h"

using namespace dar;

namespace {

const std::vector<std::string> kTwo = {"neg", "pos"};
const std::vector<std::string> kThree = {"a", "b", "c"};

ConfusionMatrix binary_counts(int tp, int fn, int tn, int fp) {
  ConfusionMatrix cm(kTwo);
  for (int i = 0; i < tp; ++i) cm.add(1, 1);
  for (int i = 0; i < fn; ++i) cm.add(1, 0);
  for (int i = 0; i < tn; ++i) cm.add(0, 0);
  for (int i = 0; i < fp; ++i) cm.add(0, 1);
  return cm;
}

// One-vs-rest accuracy written straight from the counts.
double brute_macro(const std::vector<std::vector<int>>& m) {
  const int k = static_cast<int>(m.size());
  double total = 0.0;
  for (const auto& row : m) {
    for (int v : row) total += v;
  }
  double sum = 0.0;
  for (int c = 0; c < k; ++c) {
    double correct = 0.0;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const bool truth = i == c, pred = j == c;
        if (truth == pred) correct += m[i][j];
      }
    }
    sum += correct / total;
  }
  return sum / k;
}

}  // namespace

TEST_CASE("empty input gives a zero matrix") {
  const auto cm = confusion({}, kThree);
  CHECK(cm.total() == 0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(cm.count(i, j) == 0);
  }
  CHECK_FALSE(hit_rate(cm).has_value());
}

TEST_CASE("perfect predictions are diagonal") {
  const auto cm = confusion({{0, 0}, {1, 1}, {2, 2}, {2, 2}}, kThree);
  CHECK(cm.count(2, 2) == 2);
  CHECK(cm.total() == 4);
  CHECK(multiclass_accuracy(cm) == 1.0);
  CHECK(*hit_rate(cm) == 1.0);
}

TEST_CASE("hand-counted six pairs") {
  const auto cm = confusion({{0, 0}, {0, 1}, {1, 1}, {2, 0}, {2, 2}, {1, 1}}, kThree);
  CHECK(cm.count(0, 0) == 1);
  CHECK(cm.count(0, 1) == 1);
  CHECK(cm.count(1, 1) == 2);
  CHECK(cm.count(2, 0) == 1);
  CHECK(cm.count(2, 2) == 1);
  CHECK(cm.true_positives(0) == 1);
  CHECK(cm.false_positives(0) == 1);
  CHECK(cm.false_negatives(0) == 1);
  CHECK(cm.true_negatives(0) == 3);
  CHECK(*precision(cm, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(*recall(cm, 2) == doctest::Approx(0.5));
}

TEST_CASE("unknown label is rejected") {
  ConfusionMatrix cm(kTwo);
  CHECK_THROWS_AS(cm.add(2, 0), ConfigError);
  CHECK_THROWS_AS(cm.add(0, -1), ConfigError);
}

TEST_CASE("binary metrics") {
  SUBCASE("perfect") {
    const auto m = binary_metrics(binary_counts(5, 0, 5, 0), 1);
    CHECK(*m.tpr == 1.0);
    CHECK(*m.tnr == 1.0);
    CHECK(*m.acc == 1.0);
  }
  SUBCASE("no negatives") {
    const auto m = binary_metrics(binary_counts(3, 1, 0, 0), 1);
    CHECK(*m.tpr == 0.75);
    CHECK_FALSE(m.tnr.has_value());
  }
  SUBCASE("baseline operating point") {
    const auto m = binary_metrics(binary_counts(731, 269, 816, 184), 1);
    CHECK(*m.tpr == doctest::Approx(0.731).epsilon(1e-12));
    CHECK(*m.tnr == doctest::Approx(0.816).epsilon(1e-12));
    CHECK(*m.acc == doctest::Approx(0.7735).epsilon(1e-12));
  }
  SUBCASE("positive index selects the class") {
    const auto m = binary_metrics(binary_counts(731, 269, 816, 184), 0);
    CHECK(*m.tpr == doctest::Approx(0.816));
  }
  SUBCASE("only two classes") {
    CHECK_THROWS_AS(binary_metrics(ConfusionMatrix(kThree), 1), ConfigError);
  }
}

TEST_CASE("macro one-vs-rest accuracy") {
  SUBCASE("symmetric errors") {
    ConfusionMatrix cm(kTwo);
    const int counts[2][2] = {{4, 1}, {1, 4}};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int n = 0; n < counts[i][j]; ++n) cm.add(i, j);
      }
    }
    CHECK(multiclass_accuracy(cm) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(*hit_rate(cm) == doctest::Approx(0.8));
  }
  SUBCASE("one predicted class, balanced truth") {
    ConfusionMatrix cm(kThree);
    for (int t = 0; t < 3; ++t) {
      for (int n = 0; n < 4; ++n) cm.add(t, 1);
    }
    const double expected = brute_macro({{0, 4, 0}, {0, 4, 0}, {0, 4, 0}});
    CHECK(multiclass_accuracy(cm) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(expected == doctest::Approx(5.0 / 9.0));
    CHECK(*hit_rate(cm) == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("empty matrix") {
    CHECK_THROWS_AS(multiclass_accuracy(ConfusionMatrix(kThree)), ConfigError);
  }
}

TEST_CASE("merging partial matrices is associative") {
  ConfusionMatrix a(kThree), b(kThree), c(kThree), all(kThree);
  const std::vector<std::pair<int, int>> pairs = {{0, 0}, {1, 2}, {2, 2}, {0, 1}, {1, 1}, {2, 0}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (i < 2 ? a : i < 4 ? b : c).add(pairs[i].first, pairs[i].second);
    all.add(pairs[i].first, pairs[i].second);
  }
  ConfusionMatrix left = a;
  left.merge(b);
  left.merge(c);
  ConfusionMatrix right = b;
  right.merge(c);
  ConfusionMatrix right2 = a;
  right2.merge(right);
  CHECK(left == all);
  CHECK(right2 == all);
  CHECK_THROWS(a.merge(ConfusionMatrix(kTwo)));
}

TEST_CASE("report mentions every metric") {
  const auto text = metrics_report(binary_counts(731, 269, 816, 184), 1);
  CHECK(text.find("macro_acc") != std::string::npos);
  CHECK(text.find("hit_rate") != std::string::npos);
  CHECK(text.find("tpr 0.7310") != std::string::npos);
  CHECK(text.find("tnr 0.8160") != std::string::npos);
}
