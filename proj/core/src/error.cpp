#include "numgeo/error.hpp"

namespace numgeo {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::io: return "io";
    case Errc::template_inconsistency: return "template-inconsistency";
    case Errc::corpus_too_small: return "corpus-too-small";
    case Errc::duplicate_id: return "duplicate-id";
    case Errc::corrupt_header: return "corrupt-header";
    case Errc::corrupt_record: return "corrupt-record";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::non_finite_value: return "non-finite-value";
    case Errc::truncated_file: return "truncated-file";
    case Errc::missing_record: return "missing-record";
    case Errc::missing_value: return "missing-value";
    case Errc::zero_row: return "zero-row";
    case Errc::zero_variance: return "zero-variance";
    case Errc::degenerate: return "degenerate";
    case Errc::insufficient_bins: return "insufficient-bins";
    case Errc::ill_conditioned: return "ill-conditioned";
    case Errc::empty_class: return "empty-class";
    case Errc::zero_difference: return "zero-difference";
    case Errc::parallel_axes: return "parallel-axes";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace numgeo
