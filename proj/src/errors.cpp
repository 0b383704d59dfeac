#include "bhp/errors.hpp"

namespace bhp {

namespace {

std::string with_line(const std::string& what, std::size_t line) {
  if (line == 0) return what;
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

DataError::DataError(const std::string& what, std::size_t line)
    : std::runtime_error(with_line(what, line)), line_(line) {}

ConvergenceError::ConvergenceError(const std::string& what, double estimate,
                                   double error_bound, std::optional<double> mu)
    : std::runtime_error(what),
      estimate_(estimate),
      error_bound_(error_bound),
      mu_(mu) {}

}  // namespace bhp
