#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kwstega/prompts.hpp"
#include "kwstega/roles.hpp"

namespace kwstega {

/// What a completion request is for. Mirrors PromptRole plus the internal
/// prompt-rewriting request.
enum class Purpose { keyword, evaluation, embedding, generation, extraction, feedback, optimize };

std::string_view to_string(Purpose purpose) noexcept;
Purpose purpose_of(PromptRole role) noexcept;

struct CompletionRequest {
  Purpose purpose;
  std::string prompt;     // fully rendered text sent to the model
  Variables variables;    // the values used to render it
};

/// Black-box text-in/text-out model interface. Implementations throw Error
/// with one of the Provider* codes on failure.
class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
};

/// Decorator that writes every exchange to `run_dir` as numbered plain-text
/// files ("0001-extraction.txt", ...) before returning the reply.
class TranscriptProvider final : public LlmProvider {
 public:
  TranscriptProvider(LlmProvider& inner, std::filesystem::path run_dir);
  std::string complete(const CompletionRequest& request) override;

 private:
  LlmProvider& inner_;
  std::filesystem::path run_dir_;
  std::mutex mutex_;
  std::size_t counter_ = 0;
};

/// Parses "key: value" lines between `<tag>` and `</tag>`. Text outside the
/// block is ignored. Returns nullopt if the block is missing or a non-blank
/// line inside it has no colon. Keys are canonicalized, values trimmed.
std::optional<std::vector<std::pair<std::string, std::string>>> parse_answer_block(
    std::string_view reply, std::string_view tag);

struct ExtractionResult {
  std::optional<KeywordTuple> keywords;
  std::string raw_reply;
  std::string failure;  // empty on success

  bool ok() const noexcept { return keywords.has_value(); }
  static ExtractionResult parsed(KeywordTuple tuple, std::string raw);
  static ExtractionResult parse_failure(std::string reason, std::string raw);
};

/// Strict parse of an extraction reply: exactly one line per role.
ExtractionResult parse_extraction_reply(std::string_view reply);

/// Renders the embedding or generation template and returns the reply as a
/// single line. TemplateError is raised before any provider call.
std::string generate_stego_text(LlmProvider& provider, const PromptTemplate& tmpl,
                                const KeywordTuple& keywords, std::string_view theme,
                                int max_len, const Variables& extra = {});

/// `extra` typically carries the candidate keyword lists.
ExtractionResult extract_keywords(LlmProvider& provider, const PromptTemplate& tmpl,
                                  std::string_view text, const Variables& extra = {});

/// Never throws on provider failure; returns a canned diagnosis instead.
/// Calling it with a successful extraction equal to `expected` is a contract
/// violation (std::logic_error).
std::string request_feedback(LlmProvider& provider, const PromptTemplate& tmpl,
                             std::string_view text, const KeywordTuple& expected,
                             const ExtractionResult& got);

/// Asks the model to rewrite the active template of `role` given `feedback`.
/// A reply that is missing, unparsable or drops a required placeholder falls
/// back to the next built-in tier. The result always has revision + 1 and is
/// appended to `library`.
PromptTemplate optimize_prompt(LlmProvider& provider, std::string_view feedback,
                               PromptLibrary& library, PromptRole role);

}  // namespace kwstega
