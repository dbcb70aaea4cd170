#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kwstega/catalog.hpp"
#include "kwstega/mock_provider.hpp"
#include "kwstega/provider.hpp"

namespace kwstega::testing {

// Provider whose replies come from a callback.
class ScriptedProvider final : public LlmProvider {
 public:
  using Script = std::function<std::string(const CompletionRequest&)>;
  explicit ScriptedProvider(Script script) : script_(std::move(script)) {}
  std::string complete(const CompletionRequest& request) override {
    requests.push_back(request);
    return script_(request);
  }
  std::vector<CompletionRequest> requests;

 private:
  Script script_;
};

inline KeywordCatalog fixture_catalog() {
  MockProvider mock;
  return build_catalog(mock, PromptLibrary::builtin(), "Entertainment News");
}

inline std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 0xff);
  return out;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kwstega-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Catalog with caller-chosen subjects; other roles uniform.
inline KeywordSubset uniform_subset(KeywordRole role, const std::string& prefix) {
  std::vector<Keyword> entries;
  const auto n = expected_entry_count(role);
  for (std::size_t i = 0; i < n; ++i) entries.push_back({prefix + std::to_string(i), 1.0 / static_cast<double>(n)});
  return KeywordSubset(role, std::move(entries));
}

}  // namespace kwstega::testing
