#pragma once

#include <stdexcept>
#include <string>

namespace kdvw {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the region where a quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative solve stopped without reaching its target.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Chebyshev coefficients did not decay within the allowed degree.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class BlowUpError : public Error {
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

}  // namespace kdvw
