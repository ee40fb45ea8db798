#pragma once

#include <stdexcept>
#include <string>

namespace phaseslope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad files, invalid parameters, violated
/// preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Input that is well-formed but carries no usable signal, e.g. a channel
/// whose auto-spectrum vanishes or an autocovariance that is singular.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace phaseslope
