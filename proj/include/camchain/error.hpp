#pragma once

#include <stdexcept>
#include <string>

namespace camchain {

enum class ErrorCode {
  invalid_argument,
  missing_path,
  mixed_dimensions,
  unsupported_format,
  io_failure,
  frame_too_small,
  keypoint_near_border,
  empty_input,
  degenerate_configuration,
  numerical_failure,
  point_at_infinity,
  insufficient_matches,
  no_consensus,
  too_few_frames,
  gap_in_chain,
  schema_violation,
  version_mismatch,
  singular_homography,
  length_mismatch,
  low_coverage,
  shape_mismatch,
  weight_out_of_range,
  non_finite_decomposition,
  invalid_spec,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace camchain
