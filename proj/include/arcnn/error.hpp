// Copyright 2026 The arcnn Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace arcnn {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or parameter shapes that do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed architecture notation.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Unreadable, truncated or inconsistent checkpoint / pair blob.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value (quality out of range, bad learning rate, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace arcnn
