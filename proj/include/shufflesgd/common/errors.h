// Copyright 2026 The shufflesgd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace shufflesgd {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf reached a tensor, gradient or update.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// A block was re-put with different bytes: some task is not deterministic.
class DeterminismViolation : public Error {
 public:
  using Error::Error;
};

// A block that the job barrier should have made visible is missing.
class SequencingError : public Error {
 public:
  using Error::Error;
};

}  // namespace shufflesgd
