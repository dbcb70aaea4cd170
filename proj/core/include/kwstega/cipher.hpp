#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kwstega/roles.hpp"

namespace kwstega {

inline constexpr unsigned kGroupBits = 64;
inline constexpr unsigned kLengthPrefixBits = 32;

/// One value per keyword role, each below 2^index_width(role).
using FieldValues = std::array<std::uint32_t, 4>;

/// Length-prefixed, zero-padded payload bits. Bit order is MSB-first within
/// bytes, so the bitstream is held as bytes.
struct SecretFrame {
  std::vector<std::uint8_t> payload;
  std::vector<std::uint8_t> bitstream;  // size is a positive multiple of 8

  std::size_t bit_length() const noexcept { return bitstream.size() * 8; }
};

/// bitstream = u32be(len) || payload || zeros up to the next 64-bit boundary.
SecretFrame frame(std::span<const std::uint8_t> payload);

/// Inverse of frame(). TruncatedStream if the stream is shorter than its
/// length prefix implies, TrailingData if it holds whole groups past the
/// padding, PaddingNonZero if any pad bit is set.
std::vector<std::uint8_t> deframe(std::span<const std::uint8_t> bitstream);

/// Sentences needed for a payload of this many bytes: ceil((32 + 8b) / 64).
std::size_t group_count(std::size_t payload_bytes) noexcept;

/// Secret bits of one sentence: one location index per role.
struct ChunkGroup {
  FieldValues index{};

  std::uint32_t& operator[](KeywordRole r) { return index[index_of(r)]; }
  std::uint32_t operator[](KeywordRole r) const { return index[index_of(r)]; }
  bool operator==(const ChunkGroup&) const = default;
};

/// Bits [0,18) subject, [18,36) predicate, [36,54) object, [54,64) emotion,
/// counted from the MSB.
FieldValues slice_fields(std::uint64_t word) noexcept;
std::uint64_t pack_fields(const FieldValues& fields) noexcept;

std::vector<ChunkGroup> split_chunks(std::span<const std::uint8_t> bitstream);
std::vector<std::uint8_t> join_chunks(std::span<const ChunkGroup> chunks);

/// Release time, one second resolution. Packs to 48 bits: yy|mm|dd|hh|mi|ss,
/// one byte each, big-endian.
struct TimeCode {
  std::uint8_t yy = 0, mm = 1, dd = 1, hh = 0, mi = 0, ss = 0;

  bool valid() const noexcept;
  /// Throws InvalidTimeCode if !valid().
  std::uint64_t packed() const;
  static TimeCode unpack(std::uint64_t packed);

  /// "YY-MM-DD HH:MM:SS"
  std::string to_string() const;
  static TimeCode parse(std::string_view text);

  auto operator<=>(const TimeCode&) const = default;
};

struct PrivateKey {
  std::uint64_t value = 0;

  /// 16 lowercase hex digits.
  std::string to_hex() const;
  /// Exactly 16 hex digits after trimming surrounding whitespace.
  static PrivateKey from_hex(std::string_view text);

  bool operator==(const PrivateKey&) const = default;
};

struct Mask {
  FieldValues bits{};
  bool operator==(const Mask&) const = default;
};

/// Repetition offsets (Re-Idx) per role.
struct Offsets {
  FieldValues value{};
  std::uint32_t& operator[](KeywordRole r) { return value[index_of(r)]; }
  std::uint32_t operator[](KeywordRole r) const { return value[index_of(r)]; }
  bool operator==(const Offsets&) const = default;
};

/// Masked offsets as carried in an envelope.
struct StampSet {
  FieldValues stamp{};
  std::uint32_t& operator[](KeywordRole r) { return stamp[index_of(r)]; }
  std::uint32_t operator[](KeywordRole r) const { return stamp[index_of(r)]; }
  bool operator==(const StampSet&) const = default;
};

/// Keystream = key XOR packed timecode (low 48 bits), sliced like a chunk.
Mask derive_mask(PrivateKey key, const TimeCode& t);
/// Same on a raw 48-bit packed time; accepts values such as 0 that are not
/// calendar-valid. Throws InvalidTimeCode if wider than 48 bits.
Mask derive_mask(PrivateKey key, std::uint64_t packed_time);

/// Per-role XOR; widths are checked (InvalidArgument).
StampSet apply_mask(const Offsets& offsets, const Mask& mask);
Offsets remove_mask(const StampSet& stamps, const Mask& mask);

/// stamp = offset XOR mask per role. Offsets wider than their role's index
/// width are rejected with InvalidArgument.
StampSet encrypt_offsets(const Offsets& offsets, PrivateKey key, const TimeCode& t);
Offsets decrypt_offsets(const StampSet& stamps, PrivateKey key, const TimeCode& t);

/// Lowercase hex, 5 digits for 18-bit roles and 3 for emotion.
std::string stamp_hex(KeywordRole role, std::uint32_t stamp);
/// Throws SchemaError on wrong digit count, non-hex text or overwide values.
std::uint32_t parse_stamp_hex(KeywordRole role, std::string_view text);

}  // namespace kwstega
