// Copyright 2026 The thzsource Authors
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

namespace thz {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: violated precondition, unknown name, shape mismatch.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not meet its accuracy contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The generator has more than one stationary state.
class DegenerateSteadyState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An observable is mathematically undefined at this point (e.g. g2 at zero
/// population).
class UndefinedObservable : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration document. `pointer` is a JSON pointer to the
/// offending value and `line` its 1-based line in the source (0 if unknown).
class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, int line, const std::string& message)
      : Error(format(pointer, line, message)), pointer_(std::move(pointer)), line_(line) {}

  const std::string& pointer() const { return pointer_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& pointer, int line, const std::string& message) {
    std::string where = pointer.empty() ? std::string("/") : pointer;
    if (line > 0) where += " (line " + std::to_string(line) + ")";
    return "config error at " + where + ": " + message;
  }

  std::string pointer_;
  int line_;
};

}  // namespace thz
