#include "camchain/error.hpp"

namespace camchain {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::missing_path: return "MissingPath";
    case ErrorCode::mixed_dimensions: return "MixedDimensions";
    case ErrorCode::unsupported_format: return "UnsupportedFormat";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::frame_too_small: return "FrameTooSmall";
    case ErrorCode::keypoint_near_border: return "KeypointNearBorder";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::degenerate_configuration: return "DegenerateConfiguration";
    case ErrorCode::numerical_failure: return "NumericalFailure";
    case ErrorCode::point_at_infinity: return "PointAtInfinity";
    case ErrorCode::insufficient_matches: return "InsufficientMatches";
    case ErrorCode::no_consensus: return "NoConsensus";
    case ErrorCode::too_few_frames: return "TooFewFrames";
    case ErrorCode::gap_in_chain: return "GapInChain";
    case ErrorCode::schema_violation: return "SchemaViolation";
    case ErrorCode::version_mismatch: return "VersionMismatch";
    case ErrorCode::singular_homography: return "SingularHomography";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::low_coverage: return "LowCoverage";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::weight_out_of_range: return "WeightOutOfRange";
    case ErrorCode::non_finite_decomposition: return "NonFiniteDecomposition";
    case ErrorCode::invalid_spec: return "InvalidSpec";
  }
  return "UnknownError";
}

}  // namespace camchain
