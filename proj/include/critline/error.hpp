#pragma once

#include <stdexcept>
#include <string>

namespace critline {

/// Broad failure classes. The CLI maps them onto process exit codes.
enum class ErrorKind {
  usage,               ///< bad input, bad exponent, bad range (exit 1)
  invariant_violation, ///< a construction invariant failed (exit 2)
  resolution,          ///< grid resolution or point budget insufficient (exit 3)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& what)
      : std::runtime_error(what), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Short machine-readable tag, e.g. "invalid-exponent".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

struct UnsupportedDimension : Error {
  explicit UnsupportedDimension(int n)
      : Error(ErrorKind::usage, "unsupported-dimension",
              "unsupported dimension " + std::to_string(n) + " (only 1 and 2)") {}
};

struct InvalidExponent : Error {
  explicit InvalidExponent(const std::string& what)
      : Error(ErrorKind::usage, "invalid-exponent", what) {}
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::usage, "invalid-argument", what) {}
};

struct InvalidRange : Error {
  explicit InvalidRange(const std::string& what)
      : Error(ErrorKind::usage, "invalid-range", what) {}
};

struct InvalidData : Error {
  explicit InvalidData(const std::string& what)
      : Error(ErrorKind::usage, "invalid-data", what) {}
};

struct ResolutionError : Error {
  explicit ResolutionError(const std::string& what)
      : Error(ErrorKind::resolution, "resolution", what) {}
};

struct InvariantViolation : Error {
  explicit InvariantViolation(const std::string& what)
      : Error(ErrorKind::invariant_violation, "invariant-violation", what) {}
};

struct ConstructionFailure : Error {
  explicit ConstructionFailure(const std::string& what)
      : Error(ErrorKind::invariant_violation, "construction-failure", what) {}
};

}  // namespace critline
