// Copyright 2026 The qfid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qfid {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input validation failures (bad files, bad configs, violated invariants).
/// The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Operands of incompatible shape. The CLI maps these to exit code 3.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public InputError {
 public:
  using InputError::InputError;
};

class NotPSD : public InputError {
 public:
  using InputError::InputError;
};

class NotUnitary : public InputError {
 public:
  using InputError::InputError;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ShapeError {
 public:
  using ShapeError::ShapeError;
};

class LengthMismatch : public ShapeError {
 public:
  using ShapeError::ShapeError;
};

class InvalidSpec : public InputError {
 public:
  using InputError::InputError;
};

class InvalidProbability : public InputError {
 public:
  using InputError::InputError;
};

class InvalidLambda : public InputError {
 public:
  using InputError::InputError;
};

class NegativeInput : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedDimension : public InputError {
 public:
  using InputError::InputError;
};

/// supp(rho) is not contained in supp(sigma), so lambda0 = +infinity and the
/// residue decomposition does not exist.
class InfiniteLambda0 : public InputError {
 public:
  using InputError::InputError;
};

/// lambda0 = 1 (the two states coincide); the residue decomposition would
/// divide by zero.
class DegenerateLambda0 : public InputError {
 public:
  using InputError::InputError;
};

/// Malformed state, config, or report files.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace qfid
