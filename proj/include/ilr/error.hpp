#ifndef ILR_ERROR_HPP
#define ILR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ilr {

// Malformed or inconsistent input data (bad cells, ragged rows, dimension
// mismatches, uncertainty where a precise dataset is required).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fit or sweep that could not produce a usable numerical result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exhaustive enumeration that would exceed the configured limits.
class LimitExceeded : public std::runtime_error {
 public:
  LimitExceeded(const std::string& what, double required, double limit)
      : std::runtime_error(what), required_(required), limit_(limit) {}
  double required() const noexcept { return required_; }
  double limit() const noexcept { return limit_; }

 private:
  double required_;
  double limit_;
};

}  // namespace ilr

#endif
