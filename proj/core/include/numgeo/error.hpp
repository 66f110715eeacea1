#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace numgeo {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class Errc {
  invalid_argument,
  io,
  template_inconsistency,
  corpus_too_small,
  duplicate_id,
  corrupt_header,
  corrupt_record,
  dimension_mismatch,
  non_finite_value,
  truncated_file,
  missing_record,
  missing_value,
  zero_row,
  zero_variance,
  degenerate,
  insufficient_bins,
  ill_conditioned,
  empty_class,
  zero_difference,
  parallel_axes,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace numgeo
