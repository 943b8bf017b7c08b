// Copyright 2026 The spintex Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace spintex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// An integrator or step-convergence check did not meet its tolerance.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

/// A measurement basis required for reconstruction is missing.
class IncompleteData : public Error {
 public:
  using Error::Error;
};

class NoUniquePhase : public Error {
 public:
  using Error::Error;
};

class DegenerateSpin : public Error {
 public:
  using Error::Error;
};

class TriangulationError : public Error {
 public:
  using Error::Error;
};

class UndefinedPhase : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message carries the offending line or record.
class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spintex
