#pragma once

#include <stdexcept>
#include <string>

namespace latdisp {

/// Violated precondition or invariant on caller-supplied data.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure while computing: carries a stable machine-readable code
/// ("quadrature_cap_exceeded", "nan_detected", "reference_unconverged", ...).
class ComputationError : public std::runtime_error {
 public:
  ComputationError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace detail {
inline void require(bool ok, const std::string& message) {
  if (!ok) throw PreconditionError(message);
}
}  // namespace detail

}  // namespace latdisp
