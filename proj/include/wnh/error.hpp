#pragma once

#include <stdexcept>
#include <string>

namespace wnh {

// Base of all library errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments: wrong dimensions, out-of-range parameters, bad specs.
class InputError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a function, e.g. a resolvent on the real axis.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Solver failed to converge or produced an unusable result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wnh
