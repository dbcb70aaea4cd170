#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kwstega/cipher.hpp"

namespace kwstega {

inline constexpr int kEnvelopeVersion = 1;

/// One stego unit on the channel.
struct Envelope {
  int version = kEnvelopeVersion;
  std::uint32_t sequence = 0;
  std::string stego_text;
  TimeCode timecode;
  StampSet stamps;
  std::string fingerprint;  // catalog SHA-256, lowercase hex
  std::string theme;

  bool operator==(const Envelope&) const = default;
};

/// One JSON object on one line, fields in fixed order:
/// {"version":1,"seq":0,"time":"YY-MM-DD HH:MM:SS",
///  "stamps":{"subject":"xxxxx","predicate":"xxxxx","object":"xxxxx","emotion":"xxx"},
///  "fingerprint":"...","theme":"...","text":"..."}
/// No trailing newline.
std::string serialize_envelope(const Envelope& envelope);

/// SchemaError for malformed records, VersionUnsupported for other versions.
Envelope parse_envelope(std::string_view line);

void write_envelopes(std::span<const Envelope> envelopes, std::ostream& out);
std::vector<Envelope> read_envelopes(std::istream& in);

void write_envelopes(std::span<const Envelope> envelopes, const std::filesystem::path& destination);
std::vector<Envelope> read_envelopes(const std::filesystem::path& source);

}  // namespace kwstega
