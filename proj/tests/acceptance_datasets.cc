// acceptance_datasets.cc

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

// Dataset-scale acceptance checks. Data locations come from the environment:
//   DAR_WISDM    WISDM raw file (criteria 8, 9, 10)
//   DAR_DAPHNET  Daphnet directory or single recording (criterion 11)
//   DAR_SKODA    Skoda right-arm matrix file (criterion 12)
// A criterion whose data is missing prints BLOCKED. Exit status: 1 when any
// criterion fails, 77 when none fails but some are blocked, 0 otherwise.
//
// `--smoke` runs every criterion on small synthetic files with tiny models.
// Smoke outcomes exercise the plumbing only; thresholds are still printed
// but the exit status ignores them.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dar/pipeline.h"
#include "support.h"
#include "synthetic.h"

using namespace dar;
namespace fs = std::filesystem;

namespace {

constexpr double kBudgetSeconds = 45 * 60;

// Pinned desk-scale schedule. Full-scale training runs 1000 fine-tune
// epochs; these are the reduced counts used for every dataset criterion.
struct Schedule {
  int grbm_epochs = 30;
  int brbm_epochs = 15;
  int fine_tune_epochs = 150;
  int width_divisor = 1;
};

struct Outcome {
  enum { kPass, kFail, kBlocked } status = kFail;
  std::string detail;
};

char buf[1024];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

std::vector<std::string> expand(const std::string& location) {
  if (!fs::is_directory(location)) return {location};
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(location)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

class Harness {
 public:
  Harness(Schedule schedule, dar::testing::TempDir& dir) : s_(schedule), dir_(dir) {}

  RunConfig config(DatasetFormat format, const std::vector<std::string>& paths,
                   std::vector<int> layers, bool pretrain) const {
    RunConfig c;
    c.seed = 2024;
    c.dataset.format = format;
    c.dataset.paths = paths;
    c.dataset.skip_malformed = true;
    for (int& w : layers) w = std::max(4, w / s_.width_divisor);
    c.model.layers = layers;
    c.model.first_layer.epochs = s_.grbm_epochs;
    c.model.upper_layers.epochs = s_.brbm_epochs;
    c.model.fine_tune.epochs = s_.fine_tune_epochs;
    c.pipeline.pretrain = pretrain;
    return c;
  }

  std::string features(const RunConfig& c, const std::string& tag) {
    const std::string out = dir_.file(tag + ".features");
    if (!fs::exists(out)) {
      const auto summary = cmd_ingest(c, out);
      std::printf("  ingest %s: %zu windows, L=%d\n", tag.c_str(), summary.windows,
                  summary.feature_length);
    }
    return out;
  }

  EvalReport train_eval(const RunConfig& c, const std::string& feats, const std::string& tag) {
    const std::string run = dir_.file(tag);
    cmd_train(c, feats, run);
    return cmd_eval(run);
  }

  std::string run_dir(const std::string& tag) { return dir_.file(tag); }

 private:
  Schedule s_;
  dar::testing::TempDir& dir_;
};

double hit(const ConfusionMatrix& cm) { return 100.0 * hit_rate(cm).value_or(0.0); }

Outcome wisdm_headline(Harness& h, const std::vector<std::string>& paths) {
  const auto c = h.config(DatasetFormat::kWisdm, paths, {1000, 1000, 1000}, true);
  const auto r = h.train_eval(c, h.features(c, "wisdm"), "wisdm-3x1000");
  const double hr = hit(r.confusion);
  const double macro = 100.0 * multiclass_accuracy(r.confusion);
  return {hr >= 90.0 && macro >= 95.0 ? Outcome::kPass : Outcome::kFail,
          fmt("3x1000 pretrained: hit rate %.2f%%, macro ACC %.2f%%", hr, macro)};
}

Outcome pretraining_ablation(Harness& h, const std::vector<std::string>& paths) {
  double acc[2][2];
  const int depths[2] = {5, 1};
  for (int d = 0; d < 2; ++d) {
    for (int p = 0; p < 2; ++p) {
      const auto c = h.config(DatasetFormat::kWisdm, paths,
                              std::vector<int>(static_cast<std::size_t>(depths[d]), 1000), p == 1);
      const auto r = h.train_eval(c, h.features(c, "wisdm"),
                                  fmt("wisdm-depth%d-%s", depths[d], p ? "pre" : "nopre"));
      acc[d][p] = hit(r.confusion);
    }
  }
  const double deep_gain = acc[0][1] - acc[0][0];
  const double shallow_gap = acc[1][1] - acc[1][0];
  return {deep_gain >= 0.5 && std::abs(shallow_gap) <= 0.5 ? Outcome::kPass : Outcome::kFail,
          fmt("depth 5: %.2f%% vs %.2f%% (gain %+.2f); depth 1: %.2f%% vs %.2f%% (gap %+.2f)",
              acc[0][1], acc[0][0], deep_gain, acc[1][1], acc[1][0], shallow_gap)};
}

Outcome depth_trend(Harness& h, const std::vector<std::string>& paths) {
  const auto deep = h.config(DatasetFormat::kWisdm, paths, {500, 500, 500, 500}, true);
  const auto wide = h.config(DatasetFormat::kWisdm, paths, {2000}, true);
  const double a = hit(h.train_eval(deep, h.features(deep, "wisdm"), "wisdm-4x500").confusion);
  const double b = hit(h.train_eval(wide, h.features(wide, "wisdm"), "wisdm-1x2000").confusion);
  return {a >= b ? Outcome::kPass : Outcome::kFail,
          fmt("4x500 %.2f%% vs 1x2000 %.2f%%", a, b)};
}

Outcome daphnet_freeze(Harness& h, const std::vector<std::string>& paths) {
  auto c = h.config(DatasetFormat::kDaphnet, paths, {1000, 1000, 1000}, true);
  c.dataset.sensor = DaphnetSensor::kAnkle;
  const auto r = h.train_eval(c, h.features(c, "daphnet"), "daphnet");
  if (!r.positive_class) return {Outcome::kFail, "no positive class in the evaluation"};
  const auto m = binary_metrics(r.confusion, *r.positive_class);
  const double tpr = 100.0 * m.tpr.value_or(0.0);
  const double tnr = 100.0 * m.tnr.value_or(0.0);
  return {tpr >= 85.0 && tnr >= 85.0 ? Outcome::kPass : Outcome::kFail,
          fmt("TPR %.2f%%, TNR %.2f%%", tpr, tnr)};
}

Outcome skoda_sequence(Harness& h, const std::vector<std::string>& paths) {
  const auto c = h.config(DatasetFormat::kSkoda, paths, {1000, 1000, 1000}, true);
  const auto r = h.train_eval(c, h.features(c, "skoda"), "skoda");
  const auto d = cmd_decode(h.run_dir("skoda"));
  const double macro = 100.0 * multiclass_accuracy(r.confusion);
  const double frame = hit(d.framewise);
  const double seq = hit(d.sequence);
  return {macro >= 86.0 && seq > frame ? Outcome::kPass : Outcome::kFail,
          fmt("frame-wise macro ACC %.2f%%; hit rate frame-wise %.2f%%, DL-HMM %.2f%%", macro,
              frame, seq)};
}

}  // namespace

int main(int argc, char** argv) {
  const bool smoke = argc > 1 && std::string(argv[1]) == "--smoke";
  dar::testing::TempDir dir("accept-datasets");
  Schedule schedule;
  std::optional<std::string> wisdm = env("DAR_WISDM");
  std::optional<std::string> daphnet = env("DAR_DAPHNET");
  std::optional<std::string> skoda = env("DAR_SKODA");
  if (smoke) {
    schedule = {.grbm_epochs = 2, .brbm_epochs = 2, .fine_tune_epochs = 300, .width_divisor = 50};
    wisdm = dir.file("wisdm.txt");
    dar::testing::write_wisdm(*wisdm, 3, canonical_labels(DatasetFormat::kWisdm), 60.0, 11);
    daphnet = dir.file("S01R01.txt");
    dar::testing::write_daphnet(*daphnet, 240.0, 12);
    skoda = dir.file("right_classall_clean.txt");
    dar::testing::write_skoda(*skoda, 240.0, 13);
  }
  Harness harness(schedule, dir);

  struct Criterion {
    int id;
    const char* name;
    const std::optional<std::string>& location;
    const char* variable;
    std::function<Outcome(Harness&, const std::vector<std::string>&)> run;
  };
  const std::vector<Criterion> criteria = {
      {8, "WISDM 3x1000 accuracy", wisdm, "DAR_WISDM", wisdm_headline},
      {9, "pretraining ablation", wisdm, "DAR_WISDM", pretraining_ablation},
      {10, "depth trend at matched parameters", wisdm, "DAR_WISDM", depth_trend},
      {11, "Daphnet freeze TPR/TNR", daphnet, "DAR_DAPHNET", daphnet_freeze},
      {12, "Skoda node 16 DL-HMM", skoda, "DAR_SKODA", skoda_sequence},
  };
  int failed = 0, blocked = 0;
  for (const auto& c : criteria) {
    Outcome o;
    if (!c.location || !fs::exists(*c.location)) {
      o = {Outcome::kBlocked, std::string(c.variable) +
                                  (c.location ? " points to a missing path" : " is not set")};
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        o = c.run(harness, expand(*c.location));
      } catch (const std::exception& e) {
        o = {Outcome::kFail, std::string("exception: ") + e.what()};
      }
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (secs > kBudgetSeconds && o.status == Outcome::kPass) o.status = Outcome::kFail;
      o.detail += fmt("; %.0f s", secs);
      if (smoke && o.detail.rfind("exception", 0) == 0) ++failed;
    }
    const char* tag = o.status == Outcome::kPass   ? "PASS"
                      : o.status == Outcome::kFail ? "FAIL"
                                                   : "BLOCKED";
    if (!smoke) {
      failed += o.status == Outcome::kFail;
      blocked += o.status == Outcome::kBlocked;
    }
    std::printf("criterion %2d %s%s: %s (%s)\n", c.id, tag, smoke ? " [smoke]" : "", c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  if (failed > 0) return 1;
  return blocked > 0 ? 77 : 0;
}
