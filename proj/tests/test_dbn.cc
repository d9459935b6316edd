// test_dbn.cc

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

#include <chrono>
#include <cstring>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dar/dbn.h"
#include "dar/error.h"
#include "dar/model_io.h"
#include "dar/random.h"
#include "support.h"

using namespace dar;

namespace {

Eigen::VectorXd logistic(const Eigen::VectorXd& a) {
  Eigen::VectorXd out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out(i) = 1.0 / (1.0 + std::exp(-a(i)));
  return out;
}

void randomize(DbnModel& m, Rng& rng, double scale) {
  for (auto& l : m.layers) {
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) l.weights.data()[i] = scale * rng.normal();
    for (Eigen::Index i = 0; i < l.hidden_bias.size(); ++i) l.hidden_bias(i) = scale * rng.normal();
    for (Eigen::Index i = 0; i < l.visible_bias.size(); ++i) l.visible_bias(i) = scale * rng.normal();
  }
  for (Eigen::Index i = 0; i < m.head_weights.size(); ++i) m.head_weights.data()[i] = scale * rng.normal();
  for (Eigen::Index i = 0; i < m.head_bias.size(); ++i) m.head_bias(i) = scale * rng.normal();
}

DbnModel small_model(Eigen::Index in, std::vector<int> dims, std::vector<std::string> labels,
                     std::uint64_t seed, double scale) {
  DbnModel m = random_dbn(in, dims, seed);
  m.init_head(std::move(labels));
  Rng rng(seed + 1000);
  randomize(m, rng, scale);
  return m;
}

}  // namespace

TEST_CASE("structure") {
  const auto m = random_dbn(10, {6, 4, 3}, 1);
  CHECK(m.depth() == 3);
  CHECK(m.input_dim() == 10);
  CHECK(m.widths() == std::vector<int>{6, 4, 3});
  CHECK(m.layers[0].kind == LayerKind::kGaussianBinary);
  CHECK(m.layers[1].kind == LayerKind::kBinaryBinary);
  CHECK_FALSE(m.head_initialized);
  CHECK_THROWS_AS(random_dbn(10, {}, 1), ConfigError);
  CHECK_THROWS_AS(pretrain_greedy(Eigen::MatrixXd::Zero(3, 4), {}, {}), ConfigError);
  CHECK_THROWS_AS(posterior(Eigen::VectorXd::Zero(10), m), ConfigError);
}

TEST_CASE("forward pass") {
  SUBCASE("zero parameters give one half everywhere") {
    DbnModel m = random_dbn(5, {4, 3}, 1);
    for (auto& l : m.layers) l.weights.setZero();
    for (const auto& a : forward(Eigen::VectorXd::Ones(5), m)) CHECK(a.isApprox(Eigen::VectorXd::Constant(a.size(), 0.5)));
  }
  SUBCASE("single layer equals the hidden conditional") {
    const auto m = small_model(5, {4}, {"a", "b"}, 3, 0.7);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, -1, 1);
    const auto acts = forward(x, m);
    REQUIRE(acts.size() == 1);
    CHECK(acts[0] == hidden_conditional(x, m.layers[0]));
  }
  SUBCASE("two layers match an independent composition") {
    const auto m = small_model(5, {4, 3}, {"a", "b"}, 5, 0.7);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, -2, 1);
    const Eigen::VectorXd h1 = logistic(m.layers[0].weights.transpose() * x + m.layers[0].hidden_bias);
    const Eigen::VectorXd h2 = logistic(m.layers[1].weights.transpose() * h1 + m.layers[1].hidden_bias);
    const auto acts = forward(x, m);
    CHECK((acts[1] - h2).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::MatrixXd rows(2, 5);
    rows.row(0) = x.transpose();
    rows.row(1) = -x.transpose();
    CHECK((forward_top_rows(rows, m).row(0).transpose() - h2).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("length mismatch") {
    const auto m = random_dbn(5, {4}, 1);
    CHECK_THROWS_AS(forward(Eigen::VectorXd::Zero(6), m), DimensionError);
  }
}

TEST_CASE("posterior and prediction") {
  SUBCASE("zero head is uniform") {
    DbnModel m = random_dbn(4, {3}, 2);
    m.init_head({"a", "b", "c"});
    const auto p = posterior(Eigen::VectorXd::Ones(4), m);
    CHECK(p.isApprox(Eigen::VectorXd::Constant(3, 1.0 / 3.0)));
  }
  SUBCASE("softmax by hand") {
    const auto p = softmax(Eigen::Vector2d(0.0, std::log(2.0)));
    CHECK(p(0) == doctest::Approx(1.0 / 3.0));
    CHECK(p(1) == doctest::Approx(2.0 / 3.0));
    CHECK(softmax(Eigen::Vector2d(1000.0, 1002.0)).isApprox(softmax(Eigen::Vector2d(0.0, 2.0))));
  }
  SUBCASE("simplex for extreme inputs") {
    const auto m = small_model(4, {3}, {"a", "b", "c"}, 7, 50.0);
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXd x(4);
      for (int i = 0; i < 4; ++i) x(i) = 1e6 * rng.normal();
      const auto p = posterior(x, m);
      CHECK(p.allFinite());
      CHECK(p.minCoeff() >= 0.0);
      CHECK(std::abs(p.sum() - 1.0) < 1e-9);
    }
  }
  SUBCASE("argmax and ties") {
    CHECK(argmax(Eigen::Vector3d(0.1, 0.7, 0.2)) == 1);
    CHECK(argmax(Eigen::Vector2d(0.5, 0.5)) == 0);
  }
}

TEST_CASE("fine-tuning gradient matches central differences on a 4-2-2 network") {
  const auto base = small_model(4, {2}, {"a", "b"}, 11, 0.8);
  Rng rng(12);
  Eigen::MatrixXd x(6, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const std::vector<int> y = {0, 1, 1, 0, 1, 0};
  const auto g = loss_gradient(base, x, y);
  const double h = 1e-5;
  auto check_param = [&](auto&& access, double analytic) {
    DbnModel up = base, down = base;
    access(up) += h;
    access(down) -= h;
    const double fd = (cross_entropy(up, x, y) - cross_entropy(down, x, y)) / (2 * h);
    const double rel = std::abs(fd - analytic) / std::max(1e-8, std::abs(fd) + std::abs(analytic));
    CHECK(rel < 1e-4);
  };
  for (Eigen::Index i = 0; i < 8; ++i) {
    check_param([i](DbnModel& m) -> double& { return m.layers[0].weights.data()[i]; }, g.weights[0].data()[i]);
  }
  for (Eigen::Index i = 0; i < 2; ++i) {
    check_param([i](DbnModel& m) -> double& { return m.layers[0].hidden_bias(i); }, g.hidden_bias[0](i));
  }
  for (Eigen::Index i = 0; i < 4; ++i) {
    check_param([i](DbnModel& m) -> double& { return m.head_weights.data()[i]; }, g.head_weights.data()[i]);
  }
  for (Eigen::Index i = 0; i < 2; ++i) {
    check_param([i](DbnModel& m) -> double& { return m.head_bias(i); }, g.head_bias(i));
  }
}

TEST_CASE("fine-tuning") {
  SUBCASE("zero learning rate leaves parameters and loss alone") {
    DbnModel m = small_model(3, {4}, {"a", "b"}, 21, 0.5);
    Eigen::MatrixXd x(10, 3);
    Rng rng(1);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    std::vector<int> y(10);
    for (int i = 0; i < 10; ++i) y[i] = i % 2;
    FineTuneConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 5;
    cfg.batch_size = 3;
    const auto r = fine_tune(m, x, y, cfg);
    CHECK(r.model.layers[0].weights == m.layers[0].weights);
    CHECK(r.model.head_weights == m.head_weights);
    for (double l : r.loss) CHECK(l == doctest::Approx(r.loss.front()).epsilon(1e-14));
  }
  SUBCASE("zero head gives ln M first-epoch loss before updates") {
    DbnModel m = random_dbn(3, {4}, 3);
    m.init_head({"a", "b", "c"});
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(9, 3);
    std::vector<int> y = {0, 1, 2, 0, 1, 2, 0, 1, 2};
    CHECK(cross_entropy(m, x, y) == doctest::Approx(std::log(3.0)));
    FineTuneConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 9;
    CHECK(fine_tune(m, x, y, cfg).loss[0] == doctest::Approx(std::log(3.0)));
  }
  SUBCASE("separable two-class toy set reaches 100% within 200 epochs") {
    Rng rng(5);
    Eigen::MatrixXd x(60, 2);
    std::vector<int> y(60);
    for (int i = 0; i < 60; ++i) {
      y[i] = i % 2;
      x(i, 0) = (y[i] ? 1.5 : -1.5) + 0.3 * rng.normal();
      x(i, 1) = 0.3 * rng.normal();
    }
    DbnModel m = random_dbn(2, {8}, 4);
    m.init_head({"neg", "pos"});
    FineTuneConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 200;
    cfg.batch_size = 10;
    cfg.seed = 2;
    const auto r = fine_tune(m, x, y, cfg);
    CHECK(hit_rate(r.model, x, y) == 1.0);
  }
  SUBCASE("patience stops early") {
    DbnModel m = random_dbn(2, {2}, 4);
    m.init_head({"a", "b"});
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
    FineTuneConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 50;
    cfg.patience = 3;
    CHECK(fine_tune(m, x, {0, 1, 0, 1}, cfg).loss.size() == 4);
  }
  SUBCASE("bad labels") {
    DbnModel m = random_dbn(2, {2}, 4);
    m.init_head({"a", "b"});
    CHECK_THROWS_AS(fine_tune(m, Eigen::MatrixXd::Zero(2, 2), {0, 2}, {}), ConfigError);
    CHECK_THROWS_AS(fine_tune(m, Eigen::MatrixXd::Zero(2, 2), {0}, {}), DimensionError);
  }
  SUBCASE("divergence") {
    DbnModel m = random_dbn(2, {2}, 4);
    m.init_head({"a", "b"});
    // Both hidden units saturate at 1; their summed logit overflows.
    m.layers[0].hidden_bias.setConstant(50.0);
    m.head_weights.col(0).setConstant(1e308);
    FineTuneConfig cfg;
    cfg.epochs = 3;
    CHECK_THROWS_WITH_AS(fine_tune(m, Eigen::MatrixXd::Zero(2, 2), {0, 1}, cfg),
                         doctest::Contains("epoch 1"), DivergenceError);
  }
}

TEST_CASE("pretraining") {
  Rng rng(3);
  Eigen::MatrixXd x(40, 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  std::vector<TrainConfig> cfgs = {TrainConfig::gaussian_defaults(), TrainConfig::binary_defaults()};
  for (auto& c : cfgs) {
    c.epochs = 3;
    c.batch_size = 10;
    c.seed = 9;
  }
  int calls = 0;
  const auto a = pretrain_greedy(x, {5, 3}, cfgs, [&](int, int, double) { ++calls; });
  const auto b = pretrain_greedy(x, {5, 3}, cfgs);
  CHECK(calls == 6);
  CHECK(a.model.depth() == 2);
  CHECK_FALSE(a.model.head_initialized);
  CHECK(a.model.layers[1].weights == b.model.layers[1].weights);
  CHECK(a.reconstruction_error.size() == 2);
  CHECK_THROWS_AS(pretrain_greedy(x, {5, 3}, {cfgs[0]}), ConfigError);
}

TEST_CASE("structure sweep") {
  Rng rng(8);
  SweepData data;
  data.train_x.resize(30, 4);
  data.test_x.resize(10, 4);
  for (Eigen::Index i = 0; i < data.train_x.size(); ++i) data.train_x.data()[i] = rng.normal();
  for (Eigen::Index i = 0; i < data.test_x.size(); ++i) data.test_x.data()[i] = rng.normal();
  for (int i = 0; i < 30; ++i) data.train_y.push_back(i % 2);
  for (int i = 0; i < 10; ++i) data.test_y.push_back(i % 2);
  data.pretrain_x = data.train_x;
  data.class_labels = {"a", "b"};
  SweepConfig cfg;
  cfg.first_layer.epochs = 2;
  cfg.upper_layers.epochs = 2;
  cfg.fine_tune.epochs = 3;
  cfg.fine_tune.batch_size = 10;
  cfg.master_seed = 4;
  const auto one = evaluate_structure_sweep(data, {1}, {3}, cfg);
  CHECK(one.size() == 1);
  const auto a = evaluate_structure_sweep(data, {1, 2}, {3, 5}, cfg);
  const auto b = evaluate_structure_sweep(data, {1, 2}, {3, 5}, cfg);
  REQUIRE(a.size() == 4);
  CHECK(a[1].depth == 1);
  CHECK(a[1].width == 5);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a[i].train_accuracy == b[i].train_accuracy);
    CHECK(a[i].test_accuracy == b[i].test_accuracy);
  }
  CHECK_THROWS_AS(evaluate_structure_sweep(data, {}, {3}, cfg), ConfigError);
}

TEST_CASE("model file") {
  const auto m = small_model(7, {5, 4}, {"walk", "jog", "sit"}, 31, 1.0);
  dar::testing::TempDir dir("model");
  const auto path = dir.file("m.dbn");
  save_model(m, path);
  const auto back = load_model(path);
  CHECK(back.class_labels == m.class_labels);
  CHECK(back.widths() == m.widths());
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(7, -1, 2);
  const Eigen::VectorXd p1 = posterior(x, m), p2 = posterior(x, back);
  CHECK(std::memcmp(p1.data(), p2.data(), sizeof(double) * 3) == 0);
  CHECK(serialize_model(back) == serialize_model(m));

  const std::string bytes = serialize_model(m);
  SUBCASE("bad magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(deserialize_model(bad), doctest::Contains("magic"), InputError);
  }
  SUBCASE("schema version") {
    std::string bad = bytes;
    bad[8] = 2;
    CHECK_THROWS_WITH_AS(deserialize_model(bad), doctest::Contains("version"), InputError);
  }
  SUBCASE("truncated") {
    CHECK_THROWS_AS(deserialize_model(bytes.substr(0, bytes.size() - 3)), InputError);
    CHECK_THROWS_AS(deserialize_model(bytes.substr(0, 20)), InputError);
  }
  SUBCASE("trailing bytes") {
    CHECK_THROWS_AS(deserialize_model(bytes + "x"), InputError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_model(dir.file("none.dbn")), InputError);
  }
}

TEST_CASE("file size of a five-layer 1000-wide model") {
  DbnModel m = random_dbn(303, {1000, 1000, 1000, 1000, 1000}, 1);
  m.init_head({"Walking", "Jogging", "Upstairs", "Downstairs", "Sitting", "Standing"});
  std::size_t payload = 0;
  Eigen::Index v = 303;
  for (int k = 0; k < 5; ++k) {
    payload += 8 * static_cast<std::size_t>(v * 1000 + v + 1000);
    v = 1000;
  }
  payload += 8 * (1000 * 6 + 6);
  const auto size = serialize_model(m).size();
  CHECK(size >= payload);
  CHECK(size - payload < 1024);
}

TEST_CASE("forward cost grows about linearly with depth") {
  auto time_of = [](int depth) {
    DbnModel m = random_dbn(500, std::vector<int>(static_cast<std::size_t>(depth), 500), 1);
    m.init_head({"a", "b"});
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(500);
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 9; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      double sink = 0.0;
      for (int i = 0; i < 40; ++i) sink += posterior(x, m)(0);
      const auto t1 = std::chrono::steady_clock::now();
      CHECK(sink > 0.0);
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
  };
  const double t2 = time_of(2), t4 = time_of(4);
  CHECK(t4 < 2.5 * t2);
}
