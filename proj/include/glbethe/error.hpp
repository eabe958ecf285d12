#pragma once

#include <stdexcept>
#include <string>

namespace glb {

// Error categories surfaced to callers and to the CLI error object.
enum class ErrorKind {
  unsupported_representation,
  spectral_pole,
  locality_unavailable,
  pole,
  extraction,
  no_sector_reduction,
  dimension_cap,
  non_convergence,
  invalid_argument,
  config,
  no_reference_state,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::unsupported_representation: return "unsupported representation";
    case ErrorKind::spectral_pole: return "spectral-parameter pole";
    case ErrorKind::locality_unavailable: return "locality unavailable";
    case ErrorKind::pole: return "pole";
    case ErrorKind::extraction: return "extraction error";
    case ErrorKind::no_sector_reduction: return "no sector reduction";
    case ErrorKind::dimension_cap: return "dimension cap exceeded";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::config: return "config error";
    case ErrorKind::no_reference_state: return "no reference state";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace glb
