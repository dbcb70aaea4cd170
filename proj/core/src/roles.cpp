#include "kwstega/roles.hpp"

namespace kwstega {

std::string_view to_string(KeywordRole role) noexcept {
  switch (role) {
    case KeywordRole::subject: return "subject";
    case KeywordRole::predicate: return "predicate";
    case KeywordRole::object: return "object";
    case KeywordRole::emotion: return "emotion";
  }
  return "unknown";
}

std::optional<KeywordRole> parse_keyword_role(std::string_view name) noexcept {
  for (auto role : kKeywordRoles) {
    if (to_string(role) == name) return role;
  }
  return std::nullopt;
}

std::string format_tuple(const KeywordTuple& tuple) {
  std::string out;
  for (auto role : kKeywordRoles) {
    out += to_string(role);
    out += ": ";
    out += tuple[role];
    out += '\n';
  }
  return out;
}

}  // namespace kwstega
