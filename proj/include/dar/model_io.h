// dar/model_io.h

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

#ifndef DAR_MODEL_IO_H_
#define DAR_MODEL_IO_H_

#include <cstdint>
#include <string>

#include "dar/dbn.h"

namespace dar {

// Model file layout, all integers uint32 and all reals IEEE-754 float64,
// little-endian throughout:
//
//   magic            8 bytes  "DARDBN\r\n"
//   schema version   u32      (currently 1)
//   input_dim        u32
//   depth D          u32
//   widths           D x u32
//   classes M        u32
//   head_initialized u32      (0 or 1)
//   labels           M x { u32 byte length, bytes }
//   per layer        u32 kind (0 gaussian-binary, 1 binary-binary),
//                    W row-major (visible x hidden), b (visible), c (hidden)
//   head             W row-major (top width x M), bias (M)
//
// Nothing may follow the head block.
inline constexpr std::uint32_t kModelSchemaVersion = 1;

std::string serialize_model(const DbnModel& model);
DbnModel deserialize_model(const std::string& bytes);

void save_model(const DbnModel& model, const std::string& path);
DbnModel load_model(const std::string& path);

}  // namespace dar

#endif  // DAR_MODEL_IO_H_
