// feature_io.cc

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

#include "dar/feature_io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dar/error.h"

namespace dar {
namespace {

constexpr const char* kUnlabeledName = "unlabeled";

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void check_name(const std::string& name) {
  if (name.find_first_of(",\n\r") != std::string::npos) {
    throw InputError("name '" + name + "' cannot be stored in a feature dump");
  }
}

}  // namespace

void write_features(const std::string& path, const FeatureSet& set) {
  const int dim = set.dim();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "#dar-features 1 n=" << set.n << " L=" << dim << "\n#classes ";
  for (std::size_t i = 0; i < set.class_labels.size(); ++i) {
    check_name(set.class_labels[i]);
    out << (i ? "," : "") << set.class_labels[i];
  }
  out << "\nlabel,user,recording,start";
  const int bins = set.n / 2 + 1;
  for (const char axis : {'x', 'y', 'z'}) {
    for (int k = 0; k < bins; ++k) out << ',' << axis << k;
  }
  out << '\n';
  std::string row;
  for (const auto& f : set.features) {
    if (f.values.size() != dim) {
      throw DimensionError("feature of length " + std::to_string(f.values.size()) +
                           " in a dump with L=" + std::to_string(dim));
    }
    check_name(f.origin.user);
    check_name(f.origin.recording);
    row.clear();
    if (f.label == kUnlabeled) {
      row += kUnlabeledName;
    } else {
      if (f.label < 0 || f.label >= static_cast<int>(set.class_labels.size())) {
        throw DimensionError("feature label index out of range");
      }
      row += set.class_labels[f.label];
    }
    row += ',' + f.origin.user + ',' + f.origin.recording + ',' +
           std::to_string(f.origin.start);
    for (Eigen::Index i = 0; i < f.values.size(); ++i) {
      row += ',';
      append_double(row, f.values(i));
    }
    row += '\n';
    out << row;
  }
  if (!out) throw InputError("failed writing '" + path + "'");
}

FeatureSet read_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  FeatureSet set;
  std::string line;
  int dim = 0;
  if (!std::getline(in, line) ||
      std::sscanf(line.c_str(), "#dar-features 1 n=%d L=%d", &set.n, &dim) != 2) {
    throw InputError("'" + path + "' is not a version-1 feature dump");
  }
  if (dim != feature_length(set.n)) {
    throw InputError("'" + path + "': header L does not equal 3(n/2+1)");
  }
  if (!std::getline(in, line) || !line.starts_with("#classes ")) {
    throw InputError("'" + path + "': missing #classes line");
  }
  set.class_labels = split_commas(line.substr(9));
  if (!std::getline(in, line)) throw InputError("'" + path + "': missing column header");

  std::size_t line_number = 3;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto where = "'" + path + "' line " + std::to_string(line_number);
    const auto fields = split_commas(line);
    if (static_cast<int>(fields.size()) != 4 + dim) {
      throw InputError(where + ": expected " + std::to_string(4 + dim) +
                       " fields, found " + std::to_string(fields.size()));
    }
    SpectralFeature f;
    f.n = set.n;
    if (fields[0] != kUnlabeledName) {
      const auto it =
          std::find(set.class_labels.begin(), set.class_labels.end(), fields[0]);
      if (it == set.class_labels.end()) {
        throw InputError(where + ": unknown label '" + fields[0] + "'");
      }
      f.label = static_cast<int>(it - set.class_labels.begin());
    }
    f.origin.user = fields[1];
    f.origin.recording = fields[2];
    {
      const auto& s = fields[3];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), f.origin.start);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InputError(where + ": field 'start' is not an integer");
      }
    }
    f.values.resize(dim);
    for (int i = 0; i < dim; ++i) {
      const auto& s = fields[4 + i];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), f.values(i));
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw InputError(where + ": value " + std::to_string(i) +
                         " is not a number");
      }
    }
    set.features.push_back(std::move(f));
  }
  return set;
}

}  // namespace dar
