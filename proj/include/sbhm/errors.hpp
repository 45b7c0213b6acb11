// Copyright 2026 The sbhm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SBHM_ERRORS_HPP
#define SBHM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sbhm {

// Bad input: invalid parameters, mismatched dimensions, malformed configs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The numerics could not produce the requested object.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotCriticalPoint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroEigenvalue : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoUnstableDirection : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonMinimumConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace sbhm

#endif  // SBHM_ERRORS_HPP
