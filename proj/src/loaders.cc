// loaders.cc

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

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string_view>

#include "dar/error.h"
#include "dar/ingest.h"

namespace dar {
namespace {

constexpr double kStandardGravity = 9.80665;

// Reads lines from a plain or gzip-compressed file; zlib passes
// uncompressed input through unchanged.
class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path) {
    if (!std::filesystem::exists(path)) {
      throw InputError("cannot open '" + path + "': no such file");
    }
    file_ = gzopen(path.c_str(), "rb");
    if (file_ == nullptr) throw InputError("cannot open '" + path + "'");
    gzbuffer(file_, 1 << 16);
  }
  ~LineReader() {
    if (file_ != nullptr) gzclose(file_);
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool next(std::string& line) {
    line.clear();
    char buf[4096];
    while (gzgets(file_, buf, sizeof(buf)) != nullptr) {
      line.append(buf);
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_number_;
        return true;
      }
    }
    int err = 0;
    const char* msg = gzerror(file_, &err);
    if (err != Z_OK && err != Z_STREAM_END) {
      throw InputError("read error in '" + path_ + "': " + msg);
    }
    if (!line.empty()) {
      ++line_number_;
      return true;
    }
    return false;
  }

  std::size_t line_number() const { return line_number_; }

 private:
  std::string path_;
  gzFile file_ = nullptr;
  std::size_t line_number_ = 0;
};

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_on(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(delim, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Thrown for recoverable record-level problems; converted to InputError or
// skipped depending on LoaderOptions::skip_malformed.
struct MalformedRecord {
  std::string field;
  std::string detail;
};

double parse_double(std::string_view text, const char* field) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw MalformedRecord{field, "not a finite number: '" + std::string(text) + "'"};
  }
  return value;
}

long long parse_int(std::string_view text, const char* field) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw MalformedRecord{field, "not an integer: '" + std::string(text) + "'"};
  }
  return value;
}

// Daphnet and Skoda store integer codes as floats in some exports ("1.0").
long long parse_code(std::string_view text, const char* field) {
  const double value = parse_double(text, field);
  if (value != std::floor(value)) {
    throw MalformedRecord{field, "not an integer code: '" + std::string(text) + "'"};
  }
  return static_cast<long long>(value);
}

std::string location(const std::string& path, std::size_t line) {
  return "'" + path + "' line " + std::to_string(line);
}

class SampleSink {
 public:
  SampleSink(Dataset& dataset, const LoaderOptions& options, double scale)
      : dataset_(dataset), bound_(options.bound), scale_(scale) {
    if (!(bound_ > 0.0)) throw ConfigError("saturation bound must be > 0");
  }

  void add(std::int64_t t, double x, double y, double z, std::string user,
           std::string recording, int label) {
    AccelSample s;
    s.t = t;
    s.x = std::clamp(x * scale_, -bound_, bound_);
    s.y = std::clamp(y * scale_, -bound_, bound_);
    s.z = std::clamp(z * scale_, -bound_, bound_);
    s.user = std::move(user);
    s.recording = std::move(recording);
    s.label = label;
    dataset_.samples.push_back(std::move(s));
  }

 private:
  Dataset& dataset_;
  double bound_;
  double scale_;
};

void load_wisdm(const std::string& path, const LoaderOptions& options,
                Dataset& out) {
  const double scale = options.scale > 0.0 ? options.scale : 1.0 / kStandardGravity;
  SampleSink sink(out, options, scale);
  const auto& labels = canonical_labels(DatasetFormat::kWisdm);
  LineReader reader(path);
  std::string line;
  std::int64_t record = 0;
  std::string previous_user;
  int recording = -1;
  while (reader.next(line)) {
    // Records end with ';'; some lines hold several records.
    for (std::string_view rec : split_on(line, ';')) {
      if (rec.empty()) continue;
      const std::int64_t t = record++;
      try {
        auto fields = split_on(rec, ',');
        while (fields.size() > 6 && fields.back().empty()) fields.pop_back();
        if (fields.size() != 6) {
          throw MalformedRecord{"record", "expected 6 fields, found " +
                                              std::to_string(fields.size())};
        }
        if (fields[0].empty()) throw MalformedRecord{"user", "empty"};
        const auto it = std::find(labels.begin(), labels.end(), fields[1]);
        if (it == labels.end()) {
          throw InputError(location(path, reader.line_number()) +
                           ": unknown activity label '" +
                           std::string(fields[1]) + "'");
        }
        parse_int(fields[2], "timestamp");
        const double x = parse_double(fields[3], "x");
        const double y = parse_double(fields[4], "y");
        const double z = parse_double(fields[5], "z");
        std::string user(fields[0]);
        if (user != previous_user) {
          ++recording;
          previous_user = user;
        }
        sink.add(t, x, y, z, user, "r" + std::to_string(recording),
                 static_cast<int>(it - labels.begin()));
      } catch (const MalformedRecord& bad) {
        if (!options.skip_malformed) {
          throw InputError(location(path, reader.line_number()) + ": field '" +
                           bad.field + "': " + bad.detail);
        }
        ++out.skipped_records;
      }
    }
  }
}

void load_daphnet(const std::string& path, const LoaderOptions& options,
                  Dataset& out) {
  const double scale = options.scale > 0.0 ? options.scale : 1.0e-3;
  SampleSink sink(out, options, scale);
  // File names follow S<subject>R<run>.txt.
  const std::string stem = std::filesystem::path(path).stem().stem().string();
  std::string user = stem;
  std::string recording = stem;
  if (const auto r = stem.find('R'); stem.starts_with('S') && r != std::string::npos) {
    user = stem.substr(0, r);
    recording = stem.substr(r);
  }
  int first_col = 1;
  switch (options.sensor) {
    case DaphnetSensor::kAnkle: first_col = 1; break;
    case DaphnetSensor::kThigh: first_col = 4; break;
    case DaphnetSensor::kTrunk: first_col = 7; break;
  }
  LineReader reader(path);
  std::string line;
  std::int64_t record = 0;
  while (reader.next(line)) {
    if (trim(line).empty()) continue;
    const std::int64_t t = record++;
    try {
      const auto fields = split_whitespace(line);
      if (fields.size() != 11) {
        throw MalformedRecord{"record", "expected 11 columns, found " +
                                            std::to_string(fields.size())};
      }
      parse_double(fields[0], "time");
      const double x = parse_double(fields[first_col], "x");
      const double y = parse_double(fields[first_col + 1], "y");
      const double z = parse_double(fields[first_col + 2], "z");
      const long long code = parse_code(fields[10], "label");
      if (code == 0) {
        ++out.dropped_records;
        continue;
      }
      if (code != 1 && code != 2) {
        throw InputError(location(path, reader.line_number()) +
                         ": unknown Daphnet label code " + std::to_string(code));
      }
      sink.add(t, x, y, z, user, recording, static_cast<int>(code - 1));
    } catch (const MalformedRecord& bad) {
      if (!options.skip_malformed) {
        throw InputError(location(path, reader.line_number()) + ": field '" +
                         bad.field + "': " + bad.detail);
      }
      ++out.skipped_records;
    }
  }
}

void load_skoda(const std::string& path, const LoaderOptions& options,
                Dataset& out) {
  const double scale = options.scale > 0.0 ? options.scale : 1.0;
  SampleSink sink(out, options, scale);
  const SkodaColumns& cols = options.skoda;
  if (cols.group_width < 1 || cols.xyz_offset + 3 > cols.group_width ||
      cols.label_col < 0 || cols.first_group_col < 0) {
    throw ConfigError("invalid Skoda column mapping");
  }
  const std::string recording =
      std::filesystem::path(path).stem().stem().string();
  LineReader reader(path);
  std::string line;
  std::int64_t record = 0;
  while (reader.next(line)) {
    if (trim(line).empty()) continue;
    const std::int64_t t = record++;
    try {
      const auto fields = line.find(',') != std::string::npos
                              ? split_on(line, ',')
                              : split_whitespace(line);
      if (static_cast<int>(fields.size()) <= cols.label_col) {
        throw MalformedRecord{"label", "missing column"};
      }
      const long long code = parse_code(fields[cols.label_col], "label");
      int group = -1;
      for (int g = cols.first_group_col;
           g + cols.group_width <= static_cast<int>(fields.size());
           g += cols.group_width) {
        if (parse_code(fields[g], "node id") == cols.node_id) {
          group = g;
          break;
        }
      }
      if (group < 0) {
        ++out.dropped_records;
        continue;
      }
      // 32 is the null class between annotated gestures.
      if (code == 32) {
        ++out.dropped_records;
        continue;
      }
      if (code < 48 || code > 57) {
        throw InputError(location(path, reader.line_number()) +
                         ": unknown Skoda label code " + std::to_string(code));
      }
      const int base = group + cols.xyz_offset;
      sink.add(t, parse_double(fields[base], "x"),
               parse_double(fields[base + 1], "y"),
               parse_double(fields[base + 2], "z"), "skoda", recording,
               static_cast<int>(code - 48));
    } catch (const MalformedRecord& bad) {
      if (!options.skip_malformed) {
        throw InputError(location(path, reader.line_number()) + ": field '" +
                         bad.field + "': " + bad.detail);
      }
      ++out.skipped_records;
    }
  }
}

}  // namespace

Dataset load_dataset(const std::string& path, DatasetFormat format,
                     const LoaderOptions& options) {
  Dataset out;
  out.class_labels = canonical_labels(format);
  switch (format) {
    case DatasetFormat::kWisdm: load_wisdm(path, options, out); break;
    case DatasetFormat::kDaphnet: load_daphnet(path, options, out); break;
    case DatasetFormat::kSkoda: load_skoda(path, options, out); break;
  }
  if (out.samples.empty()) {
    throw InputError("'" + path + "' contains no usable samples");
  }
  return out;
}

}  // namespace dar
