#pragma once

#include <array>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kwstega {

enum class PromptRole { keyword, evaluation, embedding, generation, extraction, feedback };

inline constexpr std::array<PromptRole, 6> kPromptRoles = {
    PromptRole::keyword,    PromptRole::evaluation, PromptRole::embedding,
    PromptRole::generation, PromptRole::extraction, PromptRole::feedback};

std::string_view to_string(PromptRole role) noexcept;

using Variables = std::map<std::string, std::string, std::less<>>;

/// Placeholder names a template body may reference.
std::span<const std::string_view> known_placeholders() noexcept;

/// Placeholders every template of `role` must contain.
std::span<const std::string_view> required_placeholders(PromptRole role) noexcept;

/// Number of built-in revision tiers shipped per role (initial, further, deep).
inline constexpr int kBuiltinTiers = 3;

/// A versioned prompt body with `{name}` placeholders. Only lowercase
/// identifiers in single braces are placeholders; any other brace is literal.
class PromptTemplate {
 public:
  /// Throws TemplateError if the body is empty, references an unknown
  /// placeholder, or lacks one the role requires.
  PromptTemplate(PromptRole role, std::string body, int revision, int tier = 0);

  PromptRole role() const noexcept { return role_; }
  const std::string& body() const noexcept { return body_; }
  int revision() const noexcept { return revision_; }
  /// Built-in tier this template descends from.
  int tier() const noexcept { return tier_; }

  std::vector<std::string> placeholders() const;

  /// Substitutes every placeholder in one pass. Values are inserted verbatim
  /// and never rescanned. Throws TemplateError if any placeholder has no value.
  std::string render(const Variables& vars) const;

  bool operator==(const PromptTemplate&) const = default;

 private:
  PromptRole role_;
  std::string body_;
  int revision_;
  int tier_;
};

const PromptTemplate& builtin_template(PromptRole role, int tier);

/// Per-role append-only revision history with an active template.
class PromptLibrary {
 public:
  /// Tier-0 built-ins active for every role.
  static PromptLibrary builtin();

  const PromptTemplate& active(PromptRole role) const;
  const std::vector<PromptTemplate>& history(PromptRole role) const;

  /// Appends and activates. Throws TemplateError unless the revision is
  /// strictly greater than the active one and the role matches.
  void append(PromptTemplate revision);

  /// Replace the active template of a role with a caller-supplied body as a
  /// new revision.
  void override_body(PromptRole role, std::string body);

 private:
  PromptLibrary() = default;
  std::array<std::vector<PromptTemplate>, kPromptRoles.size()> history_;
};

}  // namespace kwstega
