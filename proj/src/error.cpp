#include "pmelab/error.hpp"

namespace pmelab {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::numeric_error: return "numeric-error";
    case Errc::domain_error: return "domain-error";
    case Errc::scheme_failure: return "scheme-failure";
    case Errc::out_of_domain: return "out-of-domain";
    case Errc::degenerate: return "degenerate";
    case Errc::hypothesis_violation: return "hypothesis-violation";
    case Errc::hypothesis_not_satisfied: return "hypothesis-not-satisfied";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::not_found: return "not-found";
    case Errc::io_error: return "io-error";
    case Errc::config_error: return "config-error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace pmelab
