#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace amis {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition of an operation was not met by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// q(x, theta) == 0 at a point where pi(x) > 0.
class AbsoluteContinuityError : public Error {
 public:
  using Error::Error;
};

// The weights of a sample carry no mass (all zero, or a single atom).
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

// Moments could not be turned into a valid proposal. When raised from a run,
// iteration() names the 1-based iteration that failed.
class AdaptationFailure : public Error {
 public:
  explicit AdaptationFailure(const std::string& what, int iteration = 0)
      : Error(iteration > 0 ? what + " (iteration " + std::to_string(iteration) + ")" : what),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

// Rejection sampling into a truncation box ran out of budget.
class SupportEscapeError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Invalid benchmark configuration. Carries one message per offending field,
// each prefixed by its key path.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& s : items) {
      out += "\n  ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

}  // namespace amis
