// Copyright 2026 The pathint Authors
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

#ifndef PATHINT_ERRORS_HPP
#define PATHINT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pathint {

/// Invalid arguments, shapes, or settings.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures that come out of the numerics rather than the inputs.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated state or path cost became NaN or infinite.
class NonFiniteError : public NumericalError {
 public:
  NonFiniteError(std::size_t path, std::size_t step, const std::string& what)
      : NumericalError("non-finite " + what + " on path " + std::to_string(path) + " at step " +
                       std::to_string(step)),
        path_(path),
        step_(step) {}

  std::size_t path() const noexcept { return path_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t path_;
  std::size_t step_;
};

/// Every path weight underflowed to zero.
class DegenerateEnsembleError : public NumericalError {
 public:
  DegenerateEnsembleError() : NumericalError("degenerate ensemble: all path weights are zero") {}
};

/// The normal matrix of a feedback fit is numerically singular.
class SingularFitError : public NumericalError {
 public:
  SingularFitError(std::size_t node, double min_singular_value, const std::string& advice)
      : NumericalError("singular feedback fit at time node " + std::to_string(node) +
                       " (smallest singular value " + std::to_string(min_singular_value) + "); " +
                       advice),
        node_(node) {}

  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

}  // namespace pathint

#endif  // PATHINT_ERRORS_HPP
