// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef S2L_ERROR_HPP_
#define S2L_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace s2l {

// Base of every error the library throws. The CLI maps all of these to the
// "data error" exit status; usage errors are detected before the library runs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed trajectory, feature, manifest or template input.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid argument to an operation (out-of-range index, K > n, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Cross-file inconsistency, e.g. a manifest naming an id the store lacks.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace s2l

#endif  // S2L_ERROR_HPP_
