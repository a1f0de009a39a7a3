// Copyright 2026 The ratio-mc Authors.
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

#ifndef RATIO_MC_ERRORS_HPP
#define RATIO_MC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

/**
 * \file
 * \brief Exception types thrown by the library.
 *
 * Conditions that the sampling routines are expected to survive (an exhausted proposal
 * budget, degenerate importance weights) are reported as flags on the result instead.
 */

namespace ratio_mc {

/// Base class of every error raised by ratio_mc.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The distribution kind has no closed-form density.
class UnsupportedDensity : public Error {
 public:
  using Error::Error;
};

/// Moment fit could not produce a positive definite covariance.
class DegenerateData : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class TooFewSamples : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Envelope constant does not define a valid two-component mixture.
class InvalidC : public Error {
 public:
  using Error::Error;
};

/// Training diverged.
class NonFiniteLoss : public Error {
 public:
  NonFiniteLoss(std::size_t epoch, const std::string& what)
      : Error("non-finite loss at epoch " + std::to_string(epoch) + ": " + what), epoch_{epoch} {}

  [[nodiscard]] std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

class AllZeroWeights : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_{line} {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ratio_mc

#endif
