// dar/error.h

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

#ifndef DAR_ERROR_H_
#define DAR_ERROR_H_

#include <stdexcept>
#include <string>

namespace dar {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration (window length, learning rate, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed, missing or incompatible input files.
class InputError : public Error {
 public:
  using Error::Error;
};

// Vector/matrix shapes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Training produced non-finite or runaway parameters.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace dar

#endif  // DAR_ERROR_H_
