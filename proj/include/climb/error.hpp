#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace climb {

enum class Errc {
  bad_config,
  out_of_bounds,
  degenerate,
  unreachable,
  limit_violation,
  infeasible,
  no_feasible_trajectory,
  near_singular,
  numerical_divergence,
  parse_error,
  validation_error,
  seed_mismatch,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

/// Library-wide exception; `code()` tells callers which contract was broken.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace climb
