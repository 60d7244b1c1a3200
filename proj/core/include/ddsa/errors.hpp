/*
   Copyright 2026 the ddsa authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ddsa {

/// Input-side failures (bad configs, dimension mismatches, unsupported
/// modes). The CLI maps these to exit code 3.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedMode : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientSamples : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientCheckpoints : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::string key, int line)
      : InputError(message + " (key '" + key + "', line " + std::to_string(line) + ")"),
        key_(std::move(key)),
        line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Numerical failures during a run. The CLI maps these to exit code 4.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite operator evaluation, carrying the failing step index.
class NumericalFailure : public NumericalError {
 public:
  NumericalFailure(const std::string& message, std::int64_t step)
      : NumericalError(message + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

class NonConvergence : public NumericalError {
 public:
  NonConvergence(const std::string& message, double last_residual)
      : NumericalError(message + " (last residual " + std::to_string(last_residual) + ")"),
        last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_ = 0.0;
};

/// Observed expansion where the problem promised a contraction.
class ContractionViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularJacobian : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Tilted rejection sampler starved (normalizer near zero).
class DegenerateTilt : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ddsa
