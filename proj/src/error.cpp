#include "gammaent/error.hpp"

namespace gammaent {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Degenerate: return "degenerate_sample";
    case ErrorKind::Size: return "size";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Quadrature: return "quadrature";
    case ErrorKind::Config: return "config";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

}  // namespace gammaent
