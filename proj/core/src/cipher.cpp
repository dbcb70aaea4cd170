#include "kwstega/cipher.hpp"

#include <cstdio>
#include <limits>

#include "kwstega/error.hpp"
#include "kwstega/text.hpp"

namespace kwstega {
namespace {

constexpr std::uint32_t width_mask(KeywordRole role) { return (std::uint32_t{1} << index_width(role)) - 1; }

constexpr std::array<unsigned, 4> kShift = {46, 28, 10, 0};

std::uint64_t read_u64be(std::span<const std::uint8_t> bytes) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | bytes[i];
  return v;
}

void write_u64be(std::uint64_t v, std::uint8_t* out) {
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
}

int hex_digits(KeywordRole role) { return static_cast<int>((index_width(role) + 3) / 4); }

}  // namespace

std::size_t group_count(std::size_t payload_bytes) noexcept {
  return (kLengthPrefixBits + 8 * payload_bytes + kGroupBits - 1) / kGroupBits;
}

SecretFrame frame(std::span<const std::uint8_t> payload) {
  if (payload.size() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::InvalidArgument, "payload longer than 2^32-1 bytes");
  }
  SecretFrame f;
  f.payload.assign(payload.begin(), payload.end());
  f.bitstream.assign(group_count(payload.size()) * 8, 0);
  const auto len = static_cast<std::uint32_t>(payload.size());
  f.bitstream[0] = static_cast<std::uint8_t>(len >> 24);
  f.bitstream[1] = static_cast<std::uint8_t>(len >> 16);
  f.bitstream[2] = static_cast<std::uint8_t>(len >> 8);
  f.bitstream[3] = static_cast<std::uint8_t>(len);
  std::copy(payload.begin(), payload.end(), f.bitstream.begin() + 4);
  return f;
}

std::vector<std::uint8_t> deframe(std::span<const std::uint8_t> bitstream) {
  if (bitstream.size() < 8) fail(ErrorCode::TruncatedStream, "no complete 64-bit group");
  if (bitstream.size() % 8 != 0) fail(ErrorCode::LengthNotMultipleOf64, "bitstream is not whole groups");
  const std::uint64_t len = (std::uint64_t{bitstream[0]} << 24) | (std::uint64_t{bitstream[1]} << 16) |
                            (std::uint64_t{bitstream[2]} << 8) | std::uint64_t{bitstream[3]};
  const std::uint64_t needed = group_count(static_cast<std::size_t>(len)) * 8;
  if (bitstream.size() < needed) {
    fail(ErrorCode::TruncatedStream, "length prefix " + std::to_string(len) + " needs " + std::to_string(needed) +
                                         " bytes, have " + std::to_string(bitstream.size()));
  }
  const std::size_t payload_end = 4 + static_cast<std::size_t>(len);
  for (std::size_t i = payload_end; i < needed; ++i) {
    if (bitstream[i] != 0) fail(ErrorCode::PaddingNonZero, "nonzero pad byte at offset " + std::to_string(i));
  }
  if (bitstream.size() > needed) {
    fail(ErrorCode::TrailingData, std::to_string(bitstream.size() - needed) + " bytes past the padded frame");
  }
  return {bitstream.begin() + 4, bitstream.begin() + static_cast<std::ptrdiff_t>(payload_end)};
}

FieldValues slice_fields(std::uint64_t word) noexcept {
  FieldValues f{};
  for (auto role : kKeywordRoles) {
    f[index_of(role)] = static_cast<std::uint32_t>((word >> kShift[index_of(role)]) & width_mask(role));
  }
  return f;
}

std::uint64_t pack_fields(const FieldValues& fields) noexcept {
  std::uint64_t word = 0;
  for (auto role : kKeywordRoles) {
    word |= std::uint64_t{fields[index_of(role)] & width_mask(role)} << kShift[index_of(role)];
  }
  return word;
}

std::vector<ChunkGroup> split_chunks(std::span<const std::uint8_t> bitstream) {
  if (bitstream.size() % 8 != 0) {
    fail(ErrorCode::LengthNotMultipleOf64, std::to_string(bitstream.size() * 8) + " bits");
  }
  std::vector<ChunkGroup> chunks;
  chunks.reserve(bitstream.size() / 8);
  for (std::size_t off = 0; off < bitstream.size(); off += 8) {
    chunks.push_back({slice_fields(read_u64be(bitstream.subspan(off, 8)))});
  }
  return chunks;
}

std::vector<std::uint8_t> join_chunks(std::span<const ChunkGroup> chunks) {
  std::vector<std::uint8_t> out(chunks.size() * 8);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    for (auto role : kKeywordRoles) {
      if (chunks[i][role] > width_mask(role)) {
        fail(ErrorCode::InvalidArgument, "chunk field wider than " + std::to_string(index_width(role)) + " bits");
      }
    }
    write_u64be(pack_fields(chunks[i].index), out.data() + i * 8);
  }
  return out;
}

bool TimeCode::valid() const noexcept {
  return yy <= 99 && mm >= 1 && mm <= 12 && dd >= 1 && dd <= 31 && hh <= 23 && mi <= 59 && ss <= 59;
}

std::uint64_t TimeCode::packed() const {
  if (!valid()) fail(ErrorCode::InvalidTimeCode, "field out of range");
  return (std::uint64_t{yy} << 40) | (std::uint64_t{mm} << 32) | (std::uint64_t{dd} << 24) |
         (std::uint64_t{hh} << 16) | (std::uint64_t{mi} << 8) | std::uint64_t{ss};
}

TimeCode TimeCode::unpack(std::uint64_t packed) {
  if (packed >> 48) fail(ErrorCode::InvalidTimeCode, "packed timecode wider than 48 bits");
  TimeCode t;
  t.yy = static_cast<std::uint8_t>(packed >> 40);
  t.mm = static_cast<std::uint8_t>(packed >> 32);
  t.dd = static_cast<std::uint8_t>(packed >> 24);
  t.hh = static_cast<std::uint8_t>(packed >> 16);
  t.mi = static_cast<std::uint8_t>(packed >> 8);
  t.ss = static_cast<std::uint8_t>(packed);
  if (!t.valid()) fail(ErrorCode::InvalidTimeCode, "field out of range");
  return t;
}

std::string TimeCode::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02u-%02u-%02u %02u:%02u:%02u", unsigned{yy}, unsigned{mm}, unsigned{dd},
                unsigned{hh}, unsigned{mi}, unsigned{ss});
  return buf;
}

TimeCode TimeCode::parse(std::string_view text) {
  // Fixed layout "YY-MM-DD HH:MM:SS".
  constexpr std::string_view layout = "00-00-00 00:00:00";
  if (text.size() != layout.size()) fail(ErrorCode::InvalidTimeCode, "expected YY-MM-DD HH:MM:SS");
  std::array<unsigned, 6> v{};
  for (std::size_t i = 0, field = 0; i < text.size(); i += 3, ++field) {
    char a = text[i], b = text[i + 1];
    if (a < '0' || a > '9' || b < '0' || b > '9') fail(ErrorCode::InvalidTimeCode, "non-digit in timecode");
    if (i + 2 < text.size() && text[i + 2] != layout[i + 2]) fail(ErrorCode::InvalidTimeCode, "bad separator");
    v[field] = static_cast<unsigned>((a - '0') * 10 + (b - '0'));
  }
  TimeCode t{static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]), static_cast<std::uint8_t>(v[2]),
             static_cast<std::uint8_t>(v[3]), static_cast<std::uint8_t>(v[4]), static_cast<std::uint8_t>(v[5])};
  if (!t.valid()) fail(ErrorCode::InvalidTimeCode, "field out of range in '" + std::string(text) + "'");
  return t;
}

std::string PrivateKey::to_hex() const { return kwstega::to_hex(value, 16); }

PrivateKey PrivateKey::from_hex(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  if (text.size() != 16 || !parse_hex(text, v)) fail(ErrorCode::InvalidArgument, "key must be 16 hex digits");
  return PrivateKey{v};
}

Mask derive_mask(PrivateKey key, std::uint64_t packed_time) {
  if (packed_time >> 48) fail(ErrorCode::InvalidTimeCode, "packed timecode wider than 48 bits");
  return Mask{slice_fields(key.value ^ packed_time)};
}

Mask derive_mask(PrivateKey key, const TimeCode& t) { return derive_mask(key, t.packed()); }

StampSet apply_mask(const Offsets& offsets, const Mask& mask) {
  StampSet s;
  for (auto role : kKeywordRoles) {
    if (offsets[role] > width_mask(role)) {
      fail(ErrorCode::InvalidArgument, std::string(kwstega::to_string(role)) + " offset wider than " +
                                           std::to_string(index_width(role)) + " bits");
    }
    s[role] = offsets[role] ^ mask.bits[index_of(role)];
  }
  return s;
}

Offsets remove_mask(const StampSet& stamps, const Mask& mask) {
  Offsets o;
  for (auto role : kKeywordRoles) {
    if (stamps[role] > width_mask(role)) {
      fail(ErrorCode::InvalidArgument, std::string(kwstega::to_string(role)) + " stamp wider than " +
                                           std::to_string(index_width(role)) + " bits");
    }
    o[role] = stamps[role] ^ mask.bits[index_of(role)];
  }
  return o;
}

StampSet encrypt_offsets(const Offsets& offsets, PrivateKey key, const TimeCode& t) {
  return apply_mask(offsets, derive_mask(key, t));
}

Offsets decrypt_offsets(const StampSet& stamps, PrivateKey key, const TimeCode& t) {
  return remove_mask(stamps, derive_mask(key, t));
}

std::string stamp_hex(KeywordRole role, std::uint32_t stamp) { return to_hex(stamp, hex_digits(role)); }

std::uint32_t parse_stamp_hex(KeywordRole role, std::string_view text) {
  std::uint64_t v = 0;
  if (static_cast<int>(text.size()) != hex_digits(role) || text.find_first_of("ABCDEF") != std::string_view::npos ||
      !parse_hex(text, v) || v > width_mask(role)) {
    fail(ErrorCode::SchemaError, std::string(kwstega::to_string(role)) + " stamp '" + std::string(text) +
                                     "' is not " + std::to_string(hex_digits(role)) + " hex digits within " +
                                     std::to_string(index_width(role)) + " bits");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace kwstega
