#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmelab {

enum class Errc {
  invalid_argument,
  numeric_error,
  domain_error,
  scheme_failure,
  out_of_domain,
  degenerate,
  hypothesis_violation,
  hypothesis_not_satisfied,
  insufficient_data,
  not_found,
  io_error,
  config_error,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the Errc codes so
/// callers (the CLI, the Python layer) can branch on kind, not on message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace pmelab
