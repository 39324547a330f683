#ifndef ISIWTC_ERRORS_HPP
#define ISIWTC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace isiwtc {

/// Invalid inputs: bad arguments, infeasible distributions, malformed files.
class InvalidInputError : public std::runtime_error {
 public:
  explicit InvalidInputError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failures at run time: singular systems, non-convergence, underflow.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration file problems, reported with line/field context.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isiwtc

#endif
