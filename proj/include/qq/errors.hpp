#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qq {

// Argument outside the mathematical domain of an operation (p outside (0,1),
// non-positive data for Box-Cox, nu <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A value at a given position of the input violated the domain.
class ValueDomainError : public DomainError {
 public:
  ValueDomainError(const std::string& what, std::size_t index)
      : DomainError(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero variance in the ordinate; the QQ correlation is undefined.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Request lies outside the range the built-in calibration covers.
class CalibrationRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qq
