#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace casimir {

enum class errc {
  singular_input,
  unsupported_normalization,
  degenerate_series,
  insufficient_data,
  invalid_spacing,
  invalid_ratio,
  must_truncate,
  invalid_count,
  invalid_dimension,
  invalid_parameter,
  invalid_regime,
  invalid_samples,
  unstable_kernel,
  unstable_mode,
  below_criticality_unsupported,
  substitution_undefined,
  convergence_failure,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::singular_input: return "singular-input";
    case errc::unsupported_normalization: return "unsupported-normalization";
    case errc::degenerate_series: return "degenerate-series";
    case errc::insufficient_data: return "insufficient-data";
    case errc::invalid_spacing: return "invalid-spacing";
    case errc::invalid_ratio: return "invalid-ratio";
    case errc::must_truncate: return "must-truncate";
    case errc::invalid_count: return "invalid-count";
    case errc::invalid_dimension: return "invalid-dimension";
    case errc::invalid_parameter: return "invalid-parameter";
    case errc::invalid_regime: return "invalid-regime";
    case errc::invalid_samples: return "invalid-samples";
    case errc::unstable_kernel: return "unstable-kernel";
    case errc::unstable_mode: return "unstable-mode";
    case errc::below_criticality_unsupported: return "below-criticality-unsupported";
    case errc::substitution_undefined: return "substitution-undefined";
    case errc::convergence_failure: return "convergence-failure";
  }
  return "unknown";
}

/// Domain error raised by every numerical routine in the library.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace casimir
