#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <random>
#include <string>

#include "kwstega/provider.hpp"

namespace kwstega {

struct MockOptions {
  std::uint64_t seed = 0;
  /// Probability that a generated sentence loses one keyword. Drawn
  /// independently for every embedding/generation call.
  double drop_rate = 0.0;
  /// Scripted mode: every embedding-prompt sentence (the first attempt for a
  /// fresh sentence) loses a keyword; generation-prompt retries are exact.
  bool fail_first_attempt = false;
};

/// Offline stand-in for an LLM. Replies are a pure function of the options
/// and the request sequence:
///   keyword     -> a fixed entertainment-news keyword block (unnormalized)
///   evaluation  -> equal scores for every listed keyword
///   embedding / generation -> a templated sentence with all four keywords
///   extraction  -> longest whole-word match of each role's candidates
///   feedback    -> names the roles that differ
///   optimize    -> no template block, so callers fall back to built-in tiers
class MockProvider final : public LlmProvider {
 public:
  explicit MockProvider(MockOptions options = {});

  std::string complete(const CompletionRequest& request) override;

  std::size_t calls(Purpose purpose) const;
  std::size_t total_calls() const;

  /// The reply returned for Purpose::keyword.
  static std::string keyword_fixture();

 private:
  std::string generate(const CompletionRequest& request);
  double draw();

  MockOptions options_;
  mutable std::mutex mutex_;
  std::mt19937_64 rng_;
  std::array<std::size_t, 7> calls_{};
};

}  // namespace kwstega
