#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace bhp {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data. `line()` is the 1-based source line
/// when the error comes from a file, 0 otherwise.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Adaptive quadrature ran out of subdivisions before reaching its tolerance.
/// Carries the best estimate so far and the achieved error bound.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_bound,
                   std::optional<double> mu = std::nullopt);

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }
  std::optional<double> mu() const noexcept { return mu_; }

 private:
  double estimate_;
  double error_bound_;
  std::optional<double> mu_;
};

}  // namespace bhp
