#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace warpdirac {

// Error categories. The CLI maps each one onto a distinct exit code.
enum class ErrorKind {
  Configuration,     // malformed input, invalid parameters, mismatched operators
  UnsupportedFamily, // operation not defined for this metric profile family
  Hypothesis,        // a theorem hypothesis is violated (mu0 <= 1/2, (A2) fails)
  Contract,          // a pre/post-condition of an estimate is violated
  Policy,            // causal-window policy violation
  Numerical,         // LAPACK failure or non-finite results
  NonAdmissible,     // the metric fails the admissibility conditions
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace warpdirac
