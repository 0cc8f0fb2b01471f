#include "newsseg/error.hpp"

namespace newsseg {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Overlap: return "OverlapError";
    case ErrorCode::FpsMismatch: return "FpsMismatch";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::InsufficientVideos: return "InsufficientVideos";
    case ErrorCode::EmptyFrame: return "EmptyFrame";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SpanTooShort: return "SpanTooShort";
    case ErrorCode::SampleRateMismatch: return "SampleRateMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::Shape: return "ShapeError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::Divergence: return "DivergenceError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::MissingMedia: return "MissingMedia";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Usage: return "UsageError";
  }
  return "Error";
}

bool is_validation_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::Io:
    case ErrorCode::CorruptFile:
    case ErrorCode::MissingMedia:
      return false;
    default:
      return true;
  }
}

}  // namespace newsseg
