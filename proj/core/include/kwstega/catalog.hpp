#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kwstega/prompts.hpp"
#include "kwstega/provider.hpp"
#include "kwstega/roles.hpp"

namespace kwstega {

inline constexpr double kProbabilityTolerance = 1e-9;

struct Keyword {
  std::string surface;  // canonical form
  double probability;

  bool operator==(const Keyword&) const = default;
};

/// Scales strictly positive weights to sum to one. Throws InvalidArgument on
/// an empty vector or any weight that is not finite and positive.
std::vector<double> normalize_weights(std::span<const double> weights);

/// Surface rules shared by the catalog and every reply parser: canonical form,
/// nonempty, and free of the separators used by the reply grammars (',', '|',
/// ':', '<', '>').
bool is_valid_surface(std::string_view surface) noexcept;

class KeywordSubset {
 public:
  /// Throws InvalidCatalog on any invariant violation (entry count, canonical
  /// unique surfaces, positive probabilities summing to one).
  KeywordSubset(KeywordRole role, std::vector<Keyword> entries);

  KeywordRole role() const noexcept { return role_; }
  std::span<const Keyword> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<std::string> surfaces() const;
  std::vector<double> probabilities() const;

  bool operator==(const KeywordSubset&) const = default;

 private:
  KeywordRole role_;
  std::vector<Keyword> entries_;
};

/// The shared keyword side information. Immutable once built.
class KeywordCatalog {
 public:
  KeywordCatalog(std::string theme, std::array<KeywordSubset, 4> subsets, int version = 1);

  const std::string& theme() const noexcept { return theme_; }
  int version() const noexcept { return version_; }
  const KeywordSubset& subset(KeywordRole role) const { return subsets_[index_of(role)]; }
  /// Lowercase hex SHA-256 of canonical_body().
  const std::string& fingerprint() const noexcept { return fingerprint_; }

  /// Compact JSON of theme, version and subsets in fixed field order; the
  /// fingerprint input.
  std::string canonical_body() const;
  /// The catalog file contents: indented JSON in fixed field order ending in
  /// the fingerprint, terminated by a newline.
  std::string serialize() const;

  /// Comma-separated surface list per role, keyed "subject" ... "emotion",
  /// for prompt rendering.
  Variables prompt_variables() const;

  bool operator==(const KeywordCatalog&) const = default;

 private:
  std::string theme_;
  std::array<KeywordSubset, 4> subsets_;
  int version_;
  std::string fingerprint_;
};

/// Parses a keyword-prompt reply. Strict: exactly 16/16/16/3 entries, each
/// "role: surface | probability" with a positive probability. Probabilities are
/// normalized per role. Throws MalformedReply.
KeywordCatalog parse_keyword_reply(std::string_view reply, std::string_view theme);

KeywordCatalog build_catalog(LlmProvider& provider, const PromptLibrary& prompts,
                             std::string_view theme);

/// Replaces probabilities by provider scores (normalized) and bumps version.
KeywordCatalog optimize_probabilities(LlmProvider& provider, const PromptLibrary& prompts,
                                      const KeywordCatalog& catalog);

KeywordCatalog parse_catalog(std::string_view text);
void save_catalog(const KeywordCatalog& catalog, const std::filesystem::path& destination);
KeywordCatalog load_catalog(const std::filesystem::path& source);

}  // namespace kwstega
