#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gpmisspec {

enum class ErrorCode {
  domain,
  dimension_mismatch,
  not_positive_definite,
  negative_variance,
  size_limit,
  invalid_design,
  unsupported,
  non_nested,
  parse,
  io,
};

/// Stable lower-case identifier used in `ERROR <code>: <detail>` lines.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a Cholesky factorization (or a bordered extension) meets a
/// non-positive pivot after the jitter ladder is exhausted.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot, double jitter, const std::string& detail)
      : Error(ErrorCode::not_positive_definite, detail), pivot_(pivot), jitter_(jitter) {}

  [[nodiscard]] std::size_t pivot() const noexcept { return pivot_; }
  [[nodiscard]] double jitter() const noexcept { return jitter_; }

 private:
  std::size_t pivot_;
  double jitter_;
};

}  // namespace gpmisspec
