/*
 * Copyright 2026 The NAPS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NAPS_ERROR_HPP_
#define NAPS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace naps {

// Base class of every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes (configuration-like errors -> 2, numeric -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid or unsupported configuration, malformed input files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A (label, nuisance-bin) cell has no data.
class BinningError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Quadrature failure, root-finding failure, degenerate numerics.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A rejection surface never reaches the requested level within its grid.
class SaturationError : public NumericError {
 public:
  SaturationError(const std::string& what, double attainable_max)
      : NumericError(what), attainable_max_(attainable_max) {}

  double attainable_max() const { return attainable_max_; }

 private:
  double attainable_max_;
};

// Prefixes the message of `e` with a pipeline stage name and rethrows an
// exception of the same category.
[[noreturn]] void RethrowWithStage(const std::string& stage);

}  // namespace naps

#endif  // NAPS_ERROR_HPP_
