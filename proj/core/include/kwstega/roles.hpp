#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace kwstega {

enum class KeywordRole : std::uint8_t { subject = 0, predicate = 1, object = 2, emotion = 3 };

inline constexpr std::array<KeywordRole, 4> kKeywordRoles = {
    KeywordRole::subject, KeywordRole::predicate, KeywordRole::object, KeywordRole::emotion};

constexpr std::size_t index_of(KeywordRole role) noexcept { return static_cast<std::size_t>(role); }

std::string_view to_string(KeywordRole role) noexcept;
std::optional<KeywordRole> parse_keyword_role(std::string_view name) noexcept;

/// 16 for subject/predicate/object, 3 for emotion.
constexpr std::size_t expected_entry_count(KeywordRole role) noexcept {
  return role == KeywordRole::emotion ? 3 : 16;
}

/// Bits carried by one location index of this role: 18 or 10.
constexpr unsigned index_width(KeywordRole role) noexcept {
  return role == KeywordRole::emotion ? 10u : 18u;
}

constexpr std::uint32_t role_capacity(KeywordRole role) noexcept {
  return std::uint32_t{1} << index_width(role);
}

/// One keyword per role, in role order.
struct KeywordTuple {
  std::array<std::string, 4> surfaces;

  std::string& operator[](KeywordRole role) { return surfaces[index_of(role)]; }
  const std::string& operator[](KeywordRole role) const { return surfaces[index_of(role)]; }

  bool operator==(const KeywordTuple&) const = default;
};

/// "subject: x\npredicate: y\n..." with a trailing newline.
std::string format_tuple(const KeywordTuple& tuple);

}  // namespace kwstega
