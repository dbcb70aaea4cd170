#include <gtest/gtest.h>

#include <fstream>
#include <numeric>

#include "kwstega/catalog.hpp"
#include "kwstega/error.hpp"
#include "kwstega/text.hpp"
#include "support.hpp"

using namespace kwstega;
using kwstega::testing::ScriptedProvider;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no kwstega::Error thrown";
  return ErrorCode::InvalidArgument;
}

std::string drop_line_containing(std::string text, std::string_view needle) {
  auto pos = text.find(needle);
  auto start = text.rfind('\n', pos) + 1;
  auto end = text.find('\n', pos);
  text.erase(start, end - start + 1);
  return text;
}

double sum_of(std::span<const Keyword> entries) {
  double s = 0;
  for (const auto& k : entries) s += k.probability;
  return s;
}

}  // namespace

TEST(Canonical, LowercasesTrimsAndCollapses) {
  EXPECT_EQ(canonicalize("  Red   Carpet\t"), "red carpet");
  EXPECT_TRUE(is_valid_surface("red carpet"));
  EXPECT_FALSE(is_valid_surface("a|b"));
  EXPECT_FALSE(is_valid_surface("Upper"));
  EXPECT_FALSE(is_valid_surface(""));
}

TEST(BuildCatalog, FixtureReplyGivesFullSubsets) {
  auto catalog = kwstega::testing::fixture_catalog();
  EXPECT_EQ(catalog.theme(), "Entertainment News");
  EXPECT_EQ(catalog.version(), 1);
  for (auto role : kKeywordRoles) {
    EXPECT_EQ(catalog.subset(role).size(), expected_entry_count(role));
    EXPECT_NEAR(sum_of(catalog.subset(role).entries()), 1.0, 1e-12);
  }
  EXPECT_EQ(catalog.subset(KeywordRole::subject).entries()[0].surface, "dancer");
  EXPECT_EQ(catalog.fingerprint().size(), 64u);
}

TEST(BuildCatalog, FifteenSubjectsIsMalformed) {
  const auto reply = drop_line_containing(MockProvider::keyword_fixture(), "subject: choreographer");
  ScriptedProvider p([&](const CompletionRequest&) { return reply; });
  EXPECT_EQ(code_of([&] { build_catalog(p, PromptLibrary::builtin(), "News"); }), ErrorCode::MalformedReply);
}

TEST(BuildCatalog, MissingBlockIsMalformed) {
  ScriptedProvider p([](const CompletionRequest&) { return std::string("Sorry, I cannot help."); });
  EXPECT_EQ(code_of([&] { build_catalog(p, PromptLibrary::builtin(), "News"); }), ErrorCode::MalformedReply);
}

TEST(BuildCatalog, UnnormalizedWeightsAreDividedBySum) {
  std::string reply = "<keywords>\n";
  for (auto role : {"subject", "predicate", "object"}) {
    for (int i = 0; i < 16; ++i) reply += std::string(role) + ": " + role + "word" + std::to_string(i) + " | 0.2\n";
  }
  reply += "emotion: happy | 2\nemotion: calm | 1\nemotion: sad | 1\n</keywords>\n";
  ScriptedProvider p([&](const CompletionRequest&) { return reply; });
  auto c = build_catalog(p, PromptLibrary::builtin(), "News");
  for (const auto& k : c.subset(KeywordRole::subject).entries()) EXPECT_DOUBLE_EQ(k.probability, 0.2 / 3.2);
  EXPECT_DOUBLE_EQ(c.subset(KeywordRole::emotion).entries()[0].probability, 0.5);
  EXPECT_DOUBLE_EQ(c.subset(KeywordRole::emotion).entries()[2].probability, 0.25);
}

TEST(BuildCatalog, ThemeIsSentToProvider) {
  ScriptedProvider p([](const CompletionRequest&) { return MockProvider::keyword_fixture(); });
  build_catalog(p, PromptLibrary::builtin(), "Sports Daily");
  ASSERT_EQ(p.requests.size(), 1u);
  EXPECT_EQ(p.requests[0].purpose, Purpose::keyword);
  EXPECT_NE(p.requests[0].prompt.find("Sports Daily"), std::string::npos);
}

TEST(BuildCatalog, DuplicateSurfaceRejected) {
  auto reply = MockProvider::keyword_fixture();
  reply.replace(reply.find("subject: singer"), 15, "subject: dancer");
  ScriptedProvider p([&](const CompletionRequest&) { return reply; });
  EXPECT_EQ(code_of([&] { build_catalog(p, PromptLibrary::builtin(), "News"); }), ErrorCode::MalformedReply);
}

namespace {

std::string score_reply(const KeywordCatalog& c, std::function<double(KeywordRole, std::size_t)> score) {
  std::string out = "Scores follow.\n<scores>\n";
  for (auto role : kKeywordRoles) {
    const auto entries = c.subset(role).entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out += std::string(to_string(role)) + ": " + entries[i].surface + " | " + format_double(score(role, i)) + "\n";
    }
  }
  return out + "</scores>\n";
}

}  // namespace

TEST(OptimizeProbabilities, EqualScoresGiveUniform) {
  auto c = kwstega::testing::fixture_catalog();
  ScriptedProvider p([&](const CompletionRequest&) { return score_reply(c, [](auto, auto) { return 7.0; }); });
  auto o = optimize_probabilities(p, PromptLibrary::builtin(), c);
  EXPECT_EQ(o.version(), 2);
  for (const auto& k : o.subset(KeywordRole::object).entries()) EXPECT_DOUBLE_EQ(k.probability, 1.0 / 16);
  for (const auto& k : o.subset(KeywordRole::emotion).entries()) EXPECT_NEAR(k.probability, 1.0 / 3, 1e-15);
  EXPECT_NE(o.fingerprint(), c.fingerprint());
  EXPECT_EQ(p.requests.at(0).purpose, Purpose::evaluation);
}

TEST(OptimizeProbabilities, DoubledFirstScore) {
  auto c = kwstega::testing::fixture_catalog();
  ScriptedProvider p([&](const CompletionRequest&) {
    return score_reply(c, [](KeywordRole, std::size_t i) { return i == 0 ? 2.0 : 1.0; });
  });
  auto o = optimize_probabilities(p, PromptLibrary::builtin(), c);
  const auto s = o.subset(KeywordRole::subject).entries();
  EXPECT_DOUBLE_EQ(s[0].probability, 2.0 / 17);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_DOUBLE_EQ(s[i].probability, 1.0 / 17);
}

TEST(OptimizeProbabilities, MissingScoreIsMalformed) {
  auto c = kwstega::testing::fixture_catalog();
  auto reply = drop_line_containing(score_reply(c, [](auto, auto) { return 1.0; }), "object: memoir");
  ScriptedProvider p([&](const CompletionRequest&) { return reply; });
  EXPECT_EQ(code_of([&] { optimize_probabilities(p, PromptLibrary::builtin(), c); }), ErrorCode::MalformedReply);
}

TEST(OptimizeProbabilities, ProviderTimeoutPropagates) {
  auto c = kwstega::testing::fixture_catalog();
  ScriptedProvider p([](const CompletionRequest&) -> std::string { fail(ErrorCode::ProviderTimeout, "slow"); });
  EXPECT_EQ(code_of([&] { optimize_probabilities(p, PromptLibrary::builtin(), c); }), ErrorCode::ProviderTimeout);
}

TEST(CatalogFile, SaveLoadRoundTrip) {
  auto dir = kwstega::testing::scratch_dir("catalog-rt");
  auto c = kwstega::testing::fixture_catalog();
  save_catalog(c, dir / "c.json");
  auto back = load_catalog(dir / "c.json");
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.fingerprint(), c.fingerprint());
  EXPECT_EQ(back.serialize(), c.serialize());
}

TEST(CatalogFile, FingerprintIsDigestOfCanonicalBody) {
  auto c = kwstega::testing::fixture_catalog();
  EXPECT_EQ(c.fingerprint(), sha256_hex(c.canonical_body()));
  EXPECT_EQ(c.canonical_body().rfind("{\"theme\":\"Entertainment News\",\"version\":1,\"subsets\":{", 0), 0u);
}

TEST(CatalogFile, FlippedKeywordCharacter) {
  auto text = kwstega::testing::fixture_catalog().serialize();
  text.replace(text.find("\"dancer\""), 8, "\"dancfr\"");
  EXPECT_EQ(code_of([&] { parse_catalog(text); }), ErrorCode::FingerprintMismatch);
}

TEST(CatalogFile, FlippedProbabilityDigit) {
  auto text = kwstega::testing::fixture_catalog().serialize();
  text.replace(text.find("0.3}"), 4, "0.4}");
  EXPECT_EQ(code_of([&] { parse_catalog(text); }), ErrorCode::FingerprintMismatch);
}

TEST(CatalogFile, VersionZero) {
  auto text = kwstega::testing::fixture_catalog().serialize();
  text.replace(text.find("\"version\": 1"), 12, "\"version\": 0");
  EXPECT_EQ(code_of([&] { parse_catalog(text); }), ErrorCode::VersionUnsupported);
}

TEST(CatalogFile, NotJson) {
  EXPECT_EQ(code_of([] { parse_catalog("{nope"); }), ErrorCode::InvalidCatalog);
}

TEST(CatalogFile, MissingFile) {
  EXPECT_EQ(code_of([] { load_catalog("/nonexistent/dir/c.json"); }), ErrorCode::IoError);
}

TEST(KeywordSubsetInvariants, RejectsBadSums) {
  std::vector<Keyword> e = {{"a", 0.5}, {"b", 0.4}, {"c", 0.2}};
  EXPECT_EQ(code_of([&] { KeywordSubset(KeywordRole::emotion, e); }), ErrorCode::InvalidCatalog);
  e[2].probability = 0.1;
  EXPECT_NO_THROW(KeywordSubset(KeywordRole::emotion, e));
  EXPECT_EQ(code_of([&] { KeywordSubset(KeywordRole::subject, e); }), ErrorCode::InvalidCatalog);
}

TEST(KeywordCatalogInvariants, PromptVariablesListEveryRole) {
  auto vars = kwstega::testing::fixture_catalog().prompt_variables();
  EXPECT_EQ(vars.at("theme"), "Entertainment News");
  EXPECT_EQ(vars.at("emotion"), "positive, neutral, negative");
  EXPECT_EQ(vars.at("subject").rfind("dancer, singer,", 0), 0u);
}
