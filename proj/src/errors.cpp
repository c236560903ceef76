#include "warpdirac/errors.hpp"

namespace warpdirac {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::UnsupportedFamily: return "unsupported-family";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Policy: return "policy";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::NonAdmissible: return "non-admissible";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(to_string(kind)) + " error: " + message);
}

}  // namespace warpdirac
