#pragma once

#include <stdexcept>
#include <string>

namespace newsseg {

enum class ErrorCode {
  Overlap,
  FpsMismatch,
  Schema,
  UnknownLabel,
  InsufficientVideos,
  EmptyFrame,
  DimensionMismatch,
  SpanTooShort,
  SampleRateMismatch,
  TooFewSamples,
  Shape,
  EmptyInput,
  Divergence,
  VersionMismatch,
  ConfigMismatch,
  CorruptFile,
  MissingMedia,
  Io,
  Usage,
};

const char* error_code_name(ErrorCode c);

/// Whether the code describes bad input data/arguments (CLI exit 1) as
/// opposed to an I/O failure (CLI exit 2).
bool is_validation_error(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define NEWSSEG_DEFINE_ERROR(Name, Code)                        \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(std::string msg)                              \
        : Error(ErrorCode::Code, std::move(msg)) {}             \
  }

NEWSSEG_DEFINE_ERROR(OverlapError, Overlap);
NEWSSEG_DEFINE_ERROR(FpsMismatchError, FpsMismatch);
NEWSSEG_DEFINE_ERROR(SchemaError, Schema);
NEWSSEG_DEFINE_ERROR(UnknownLabelError, UnknownLabel);
NEWSSEG_DEFINE_ERROR(InsufficientVideosError, InsufficientVideos);
NEWSSEG_DEFINE_ERROR(EmptyFrameError, EmptyFrame);
NEWSSEG_DEFINE_ERROR(DimensionMismatchError, DimensionMismatch);
NEWSSEG_DEFINE_ERROR(SpanTooShortError, SpanTooShort);
NEWSSEG_DEFINE_ERROR(SampleRateMismatchError, SampleRateMismatch);
NEWSSEG_DEFINE_ERROR(TooFewSamplesError, TooFewSamples);
NEWSSEG_DEFINE_ERROR(ShapeError, Shape);
NEWSSEG_DEFINE_ERROR(EmptyInputError, EmptyInput);
NEWSSEG_DEFINE_ERROR(DivergenceError, Divergence);
NEWSSEG_DEFINE_ERROR(VersionMismatchError, VersionMismatch);
NEWSSEG_DEFINE_ERROR(ConfigMismatchError, ConfigMismatch);
NEWSSEG_DEFINE_ERROR(CorruptFileError, CorruptFile);
NEWSSEG_DEFINE_ERROR(MissingMediaError, MissingMedia);
NEWSSEG_DEFINE_ERROR(IoError, Io);
NEWSSEG_DEFINE_ERROR(UsageError, Usage);

#undef NEWSSEG_DEFINE_ERROR

}  // namespace newsseg
