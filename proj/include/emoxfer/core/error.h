// Copyright (c) 2026 The emoxfer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMOXFER_CORE_ERROR_H_
#define EMOXFER_CORE_ERROR_H_

#include <stdexcept>
#include <string>

namespace emoxfer {

// Base of every error raised by the library. Callers that only need a
// message can catch this; the subclasses exist so tests and the CLI can
// tell failure classes apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShortInputError : public Error {
 public:
  using Error::Error;
};

// Non-finite samples, empty inputs, impossible values.
class DataError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class MissingStatsError : public Error {
 public:
  using Error::Error;
};

// Hyperparameter outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace emoxfer

#endif  // EMOXFER_CORE_ERROR_H_
