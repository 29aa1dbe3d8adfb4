#pragma once

#include <stdexcept>
#include <string>

namespace qmb {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed files, unknown names, bad query syntax.
class InputError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An explicit enumeration or program-size limit would be exceeded.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmb
