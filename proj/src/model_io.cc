// model_io.cc

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

#include "dar/model_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "dar/error.h"

namespace dar {
namespace {

constexpr std::string_view kMagic{"DARDBN\r\n", 8};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  void bytes(std::string_view s) { out_.append(s); }
  // Row-major regardless of Eigen's storage order.
  void matrix(const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
  }
  void vector(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : data_(bytes) {}

  std::string_view take(std::size_t n) {
    if (data_.size() - pos_ < n) throw InputError("model file is truncated");
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint32_t u32() {
    const auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }
  double f64() {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return std::bit_cast<double>(v);
  }
  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    check_room(rows * cols);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f64();
    }
    return m;
  }
  Eigen::VectorXd vector(Eigen::Index n) {
    check_room(n);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = f64();
    return v;
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  void check_room(Eigen::Index count) const {
    if (count < 0 || static_cast<std::size_t>(count) > (data_.size() - pos_) / 8) {
      throw InputError("model file is truncated");
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const DbnModel& model) {
  model.validate();
  Writer w;
  w.bytes(kMagic);
  w.u32(kModelSchemaVersion);
  w.u32(static_cast<std::uint32_t>(model.input_dim()));
  w.u32(static_cast<std::uint32_t>(model.depth()));
  for (int width : model.widths()) w.u32(static_cast<std::uint32_t>(width));
  w.u32(static_cast<std::uint32_t>(model.num_classes()));
  w.u32(model.head_initialized ? 1 : 0);
  for (const auto& label : model.class_labels) {
    w.u32(static_cast<std::uint32_t>(label.size()));
    w.bytes(label);
  }
  for (const auto& layer : model.layers) {
    w.u32(layer.kind == LayerKind::kGaussianBinary ? 0 : 1);
    w.matrix(layer.weights);
    w.vector(layer.visible_bias);
    w.vector(layer.hidden_bias);
  }
  const Eigen::Index top = model.layers.back().hidden_dim();
  if (model.head_initialized) {
    w.matrix(model.head_weights);
    w.vector(model.head_bias);
  } else {
    w.matrix(Eigen::MatrixXd::Zero(top, model.num_classes()));
    w.vector(Eigen::VectorXd::Zero(model.num_classes()));
  }
  return w.take();
}

DbnModel deserialize_model(const std::string& bytes) {
  Reader r(bytes);
  if (bytes.size() < kMagic.size() || r.take(kMagic.size()) != kMagic) {
    throw InputError("not a DBN model file (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kModelSchemaVersion) {
    throw InputError("unsupported model schema version " + std::to_string(version) +
                     " (expected " + std::to_string(kModelSchemaVersion) + ")");
  }
  const Eigen::Index input_dim = r.u32();
  const std::uint32_t depth = r.u32();
  if (depth == 0 || depth > 1024) throw InputError("model file has invalid depth");
  std::vector<Eigen::Index> widths;
  for (std::uint32_t k = 0; k < depth; ++k) widths.push_back(r.u32());
  const std::uint32_t classes = r.u32();
  if (classes > 1u << 16) throw InputError("model file has invalid class count");
  const std::uint32_t head_flag = r.u32();
  if (head_flag > 1) throw InputError("model file has invalid head flag");

  DbnModel model;
  for (std::uint32_t i = 0; i < classes; ++i) {
    const std::uint32_t len = r.u32();
    model.class_labels.emplace_back(r.take(len));
  }
  Eigen::Index visible = input_dim;
  for (std::uint32_t k = 0; k < depth; ++k) {
    RbmLayer layer;
    const std::uint32_t kind = r.u32();
    if (kind > 1) throw InputError("model file has invalid layer kind");
    layer.kind = kind == 0 ? LayerKind::kGaussianBinary : LayerKind::kBinaryBinary;
    layer.weights = r.matrix(visible, widths[k]);
    layer.visible_bias = r.vector(visible);
    layer.hidden_bias = r.vector(widths[k]);
    model.layers.push_back(std::move(layer));
    visible = widths[k];
  }
  model.head_weights = r.matrix(visible, classes);
  model.head_bias = r.vector(classes);
  model.head_initialized = head_flag == 1;
  if (!r.at_end()) throw InputError("model file has trailing bytes");
  try {
    model.validate();
  } catch (const Error& e) {
    throw InputError(std::string("model file is inconsistent: ") + e.what());
  }
  return model;
}

void save_model(const DbnModel& model, const std::string& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing '" + path + "'");
}

DbnModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace dar
