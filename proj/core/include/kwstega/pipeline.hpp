#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kwstega/augment.hpp"
#include "kwstega/catalog.hpp"
#include "kwstega/cipher.hpp"
#include "kwstega/envelope.hpp"
#include "kwstega/prompts.hpp"
#include "kwstega/provider.hpp"

namespace kwstega {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimeCode now() = 0;
};

/// UTC wall clock, truncated to seconds; years map to yy = year % 100.
class SystemClock final : public Clock {
 public:
  TimeCode now() override;
};

/// Returns `start`, then advances by `step_seconds` on each call. Used for
/// reproducible runs.
class SteppingClock final : public Clock {
 public:
  explicit SteppingClock(TimeCode start, int step_seconds = 1);
  TimeCode now() override;

 private:
  TimeCode next_;
  int step_;
};

/// Calendar-correct addition within 2000-2099.
TimeCode add_seconds(const TimeCode& t, long long seconds);

struct SessionConfig {
  int max_iterations = 8;
  int max_len = 30;
  /// Empty means the catalog theme.
  std::string theme;
  /// Null means SystemClock.
  std::shared_ptr<Clock> clock;
};

struct RunReport {
  std::vector<int> iterations;  // generations per sentence
  std::size_t generations = 0;
  std::size_t rejections = 0;
  std::array<int, kPromptRoles.size()> final_revisions{};
  std::size_t total_words = 0;
  std::size_t payload_bits = 0;   // 8 * payload bytes
  std::size_t embedded_bits = 0;  // 64 * sentences

  double reject_rate() const noexcept;
  double mean_iterations() const noexcept;
  /// embedded_bits / total_words.
  double embedding_capacity() const;

  std::string summary() const;
  /// Single-line JSON record.
  std::string to_json() const;
};

struct EmbedResult {
  std::vector<Envelope> envelopes;
  RunReport report;
};

/// Plans, generates and verifies one sentence per 64-bit chunk. A sentence is
/// accepted only when extraction returns exactly the planned keywords; every
/// rejection requests feedback, rewrites the generation, embedding and
/// extraction prompts, and regenerates with the generation prompt.
/// MaxRejectionsExceeded after session.max_iterations generations.
EmbedResult embed_pipeline(std::span<const std::uint8_t> payload, PrivateKey key, LlmProvider& provider,
                           const KeywordCatalog& catalog, const SessionConfig& session, PromptLibrary& prompts);

EmbedResult embed_pipeline(std::span<const std::uint8_t> payload, PrivateKey key, LlmProvider& provider,
                           const KeywordCatalog& catalog, const SessionConfig& session);

/// Receiver side. FingerprintMismatch if any envelope names another catalog,
/// MissingSequence unless sequence numbers are exactly 0..n-1, ExtractionFailed
/// if the provider reply cannot be parsed, plus codec errors.
std::vector<std::uint8_t> extract_pipeline(std::span<const Envelope> envelopes, PrivateKey key,
                                           LlmProvider& provider, const KeywordCatalog& catalog,
                                           const PromptLibrary& prompts);

std::vector<std::uint8_t> extract_pipeline(std::span<const Envelope> envelopes, PrivateKey key,
                                           LlmProvider& provider, const KeywordCatalog& catalog);

}  // namespace kwstega
