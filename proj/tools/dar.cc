// dar.cc

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

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dar/error.h"
#include "dar/pipeline.h"

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> noise_sigma;
  std::vector<std::string> data;
  bool no_pretrain = false;
  bool hmm = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON run config");
  cmd->add_option("--set", c.overrides, "Override a config key, e.g. model.layers=[500,500]");
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--threads", c.threads, "Worker cap")->check(CLI::PositiveNumber);
}

nlohmann::json base_json(const Common& c) {
  if (c.config_path.empty()) return dar::RunConfig{}.to_json();
  return dar::RunConfig::load(c.config_path).to_json();
}

dar::RunConfig resolve(const Common& c) {
  nlohmann::json j = base_json(c);
  for (const auto& o : c.overrides) dar::apply_override(j, o);
  if (c.seed) j["seed"] = *c.seed;
  if (c.threads) j["threads"] = *c.threads;
  if (c.noise_sigma) j["pipeline"]["noise_sigma"] = *c.noise_sigma;
  if (!c.data.empty()) j["dataset"]["paths"] = c.data;
  if (c.no_pretrain) j["pipeline"]["pretrain"] = false;
  if (c.hmm) j["pipeline"]["hmm"] = true;
  dar::RunConfig config = dar::RunConfig::from_json(j);
  Eigen::setNbThreads(config.threads);
  return config;
}

std::vector<int> parse_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                         : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size() || out.back() < 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw dar::ConfigError("bad list entry '" + item + "' in '" + text + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Deep activity recognition pipeline"};
  app.require_subcommand(1);

  Common ingest_opts;
  std::string ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Load a dataset and write spectral features");
  add_common(ingest, ingest_opts);
  ingest->add_option("--data", ingest_opts.data, "Dataset file(s), overriding dataset.paths");
  ingest->add_option("--noise-sigma", ingest_opts.noise_sigma, "Additive noise on samples (g)");
  ingest->add_option("--out", ingest_out, "Feature dump path")->required();

  Common train_opts;
  std::string train_features, train_out, train_manifest;
  auto* train = app.add_subcommand("train", "Pretrain and fine-tune a DBN");
  add_common(train, train_opts);
  train->add_option("--features", train_features, "Feature dump from ingest");
  train->add_option("--manifest", train_manifest, "Re-run from an existing manifest");
  train->add_option("--out", train_out, "Run directory")->required();
  train->add_flag("--no-pretrain", train_opts.no_pretrain, "Skip generative pretraining");
  train->add_flag("--hmm", train_opts.hmm, "Also estimate the HMM and decode after training");
  bool quiet = false;
  train->add_flag("--quiet", quiet, "No per-epoch log on stderr");

  std::string eval_run, eval_features;
  auto* eval = app.add_subcommand("eval", "Frame-wise metrics on the test split");
  eval->add_option("--run", eval_run, "Run directory")->required();
  eval->add_option("--features", eval_features, "Alternative feature dump");

  std::string decode_run, decode_features;
  auto* decode = app.add_subcommand("decode", "HMM decoding of test recordings");
  decode->add_option("--run", decode_run, "Run directory")->required();
  decode->add_option("--features", decode_features, "Alternative feature dump");

  Common sweep_opts;
  std::string sweep_features, sweep_out, depths = "1,2,3,4,5", widths = "100,500,1000";
  auto* sweep = app.add_subcommand("sweep", "Depth x width accuracy grid as CSV");
  add_common(sweep, sweep_opts);
  sweep->add_flag("--no-pretrain", sweep_opts.no_pretrain, "Skip generative pretraining");
  sweep->add_option("--features", sweep_features, "Feature dump")->required();
  sweep->add_option("--depths", depths, "Comma-separated depths");
  sweep->add_option("--widths", widths, "Comma-separated widths");
  sweep->add_option("--out", sweep_out, "CSV path (stdout when omitted)");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Summarize a model or HMM file");
  inspect->add_option("path", inspect_path, "model.dbn or hmm.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dar::kExitOk : dar::kExitConfig;
  }

  auto opt = [](const std::string& s) {
    return s.empty() ? std::optional<std::string>{} : std::optional<std::string>{s};
  };

  if (*ingest) {
    const auto summary = dar::cmd_ingest(resolve(ingest_opts), ingest_out);
    std::cout << summary.to_json().dump(2) << "\n";
  } else if (*train) {
    dar::RunConfig config;
    std::string features = train_features;
    if (!train_manifest.empty()) {
      const auto info = dar::read_manifest(train_manifest);
      if (features.empty()) {
        features = info.features_path;
        if (dar::sha256_file(features) != info.features_sha256) {
          throw dar::InputError("feature file '" + features +
                                "' does not match the manifest checksum");
        }
      }
      Common c = train_opts;
      nlohmann::json j = info.config.to_json();
      for (const auto& o : c.overrides) dar::apply_override(j, o);
      if (c.seed) j["seed"] = *c.seed;
      if (c.threads) j["threads"] = *c.threads;
      if (c.no_pretrain) j["pipeline"]["pretrain"] = false;
      if (c.hmm) j["pipeline"]["hmm"] = true;
      config = dar::RunConfig::from_json(j);
    } else {
      if (features.empty()) throw dar::ConfigError("train needs --features or --manifest");
      config = resolve(train_opts);
    }
    const auto summary =
        dar::cmd_train(config, features, train_out, quiet ? nullptr : &std::cerr);
    std::cout << "model " << summary.model_path << "\n"
              << "manifest " << summary.manifest_path << "\n"
              << "train_windows " << summary.train_windows << "\n"
              << "test_windows " << summary.test_windows << "\n"
              << "final_loss " << summary.final_loss << "\n"
              << "final_train_accuracy " << summary.final_train_accuracy << "\n";
    if (config.pipeline.hmm) {
      std::cout << dar::cmd_eval(train_out).text << dar::cmd_decode(train_out).text;
    }
  } else if (*eval) {
    std::cout << dar::cmd_eval(eval_run, opt(eval_features)).text;
  } else if (*decode) {
    std::cout << dar::cmd_decode(decode_run, opt(decode_features)).text;
  } else if (*sweep) {
    const std::string csv = dar::cmd_sweep(resolve(sweep_opts), sweep_features,
                                           parse_list(depths), parse_list(widths));
    if (sweep_out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(sweep_out);
      if (!(out << csv)) throw dar::InputError("cannot write '" + sweep_out + "'");
    }
  } else if (*inspect) {
    std::cout << dar::cmd_inspect(inspect_path);
  }
  return dar::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const dar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dar::kExitConfig;
  } catch (const dar::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return dar::kExitInput;
  } catch (const dar::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return dar::kExitInput;
  } catch (const dar::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return dar::kExitDivergence;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dar::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dar::kExitFailure;
  }
}
