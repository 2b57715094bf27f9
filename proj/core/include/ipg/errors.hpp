// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ipg {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// Malformed instances, dimension mismatches, out-of-domain values.
class InputError : public Error {
public:
  explicit InputError(const std::string &what) : Error(what) {}
};

/// A solver engine failed or returned something inconsistent.
class BackendError : public Error {
public:
  explicit BackendError(const std::string &what) : Error(what) {}
};

/// Exact arithmetic overflow or a failed exact re-verification.
class NumericalError : public Error {
public:
  explicit NumericalError(const std::string &what) : Error(what) {}
};

/// A best-response subproblem ran out of time; the master turns this
/// into a TIME_LIMIT report.
class OracleTimeout : public Error {
public:
  explicit OracleTimeout(const std::string &what) : Error(what) {}
};

/// The brute-force profile cap would be exceeded.
class CapExceeded : public InputError {
public:
  explicit CapExceeded(const std::string &what) : InputError(what) {}
};

} // namespace ipg
