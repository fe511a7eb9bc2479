#include "gpmisspec/error.hpp"

namespace gpmisspec {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::not_positive_definite: return "not-positive-definite";
    case ErrorCode::negative_variance: return "negative-variance";
    case ErrorCode::size_limit: return "size-limit";
    case ErrorCode::invalid_design: return "invalid-design";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::non_nested: return "non-nested";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace gpmisspec
