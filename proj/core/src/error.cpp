#include "kwstega/error.hpp"

namespace kwstega {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedReply: return "malformed_reply";
    case ErrorCode::InvalidCatalog: return "invalid_catalog";
    case ErrorCode::FingerprintMismatch: return "fingerprint_mismatch";
    case ErrorCode::VersionUnsupported: return "version_unsupported";
    case ErrorCode::IoError: return "io_error";
    case ErrorCode::CapacityTooSmall: return "capacity_too_small";
    case ErrorCode::IndexOutOfRange: return "index_out_of_range";
    case ErrorCode::UnknownKeyword: return "unknown_keyword";
    case ErrorCode::PaddingNonZero: return "padding_non_zero";
    case ErrorCode::TruncatedStream: return "truncated_stream";
    case ErrorCode::TrailingData: return "trailing_data";
    case ErrorCode::LengthNotMultipleOf64: return "length_not_multiple_of_64";
    case ErrorCode::InvalidTimeCode: return "invalid_timecode";
    case ErrorCode::OffsetOutOfRange: return "offset_out_of_range";
    case ErrorCode::ProviderTransport: return "provider_transport";
    case ErrorCode::ProviderAuth: return "provider_auth";
    case ErrorCode::ProviderRateLimited: return "provider_rate_limited";
    case ErrorCode::ProviderTimeout: return "provider_timeout";
    case ErrorCode::TemplateError: return "template_error";
    case ErrorCode::MaxRejectionsExceeded: return "max_rejections_exceeded";
    case ErrorCode::MissingSequence: return "missing_sequence";
    case ErrorCode::SchemaError: return "schema_error";
    case ErrorCode::ExtractionFailed: return "extraction_failed";
    case ErrorCode::ZeroWords: return "zero_words";
    case ErrorCode::EmptyText: return "empty_text";
    case ErrorCode::ZeroProbability: return "zero_probability";
    case ErrorCode::EmptyCounts: return "empty_counts";
    case ErrorCode::TooFewSamples: return "too_few_samples";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

bool is_provider_error(ErrorCode code) noexcept {
  return code == ErrorCode::ProviderTransport || code == ErrorCode::ProviderAuth ||
         code == ErrorCode::ProviderRateLimited || code == ErrorCode::ProviderTimeout;
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace kwstega
