#ifndef VARHSMM_ERRORS_HPP
#define VARHSMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace varhsmm {

/// Input that violates a documented precondition (bad dimensions, malformed
/// files, non-positive prices, ...). The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File-system failures. The CLI maps this to exit code 1.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// EM failure at a given iteration (non-finite likelihood, singular
/// covariance without shrinkage).
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace varhsmm

#endif  // VARHSMM_ERRORS_HPP
