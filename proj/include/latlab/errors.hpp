#ifndef LATLAB_ERRORS_HPP
#define LATLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace latlab {

// Exit codes used by the command-line runner.
enum class ExitCode : int { ok = 0, check_failure = 1, input_error = 2, resource_cap = 3 };

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Malformed arguments, dimension mismatches, schema violations.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ExitCode::input_error, what) {}
};

// Arguments outside the mathematical domain of an operation (e.g. |lambda| > q+1).
class DomainError : public InputError {
 public:
  explicit DomainError(const std::string& what) : InputError(what) {}
};

// An enumeration or solve would exceed its configured cap.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ExitCode::resource_cap, what) {}
};

// Degenerate factorizations, non-convergence.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ExitCode::check_failure, what) {}
};

}  // namespace latlab

#endif
