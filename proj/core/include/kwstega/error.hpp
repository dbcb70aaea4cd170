#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kwstega {

enum class ErrorCode {
  // catalog
  MalformedReply,
  InvalidCatalog,
  FingerprintMismatch,
  VersionUnsupported,
  IoError,
  // augment
  CapacityTooSmall,
  IndexOutOfRange,
  UnknownKeyword,
  // cipher
  PaddingNonZero,
  TruncatedStream,
  TrailingData,
  LengthNotMultipleOf64,
  InvalidTimeCode,
  // codec
  OffsetOutOfRange,
  // provider
  ProviderTransport,
  ProviderAuth,
  ProviderRateLimited,
  ProviderTimeout,
  TemplateError,
  // pipeline
  MaxRejectionsExceeded,
  MissingSequence,
  SchemaError,
  ExtractionFailed,
  // metrics
  ZeroWords,
  EmptyText,
  ZeroProbability,
  EmptyCounts,
  TooFewSamples,
  DimensionMismatch,
  InvalidArgument,
};

/// Stable snake_case name used in diagnostics, e.g. "offset_out_of_range".
std::string_view to_string(ErrorCode code) noexcept;

bool is_provider_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace kwstega
