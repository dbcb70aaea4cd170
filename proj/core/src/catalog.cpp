#include "kwstega/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "kwstega/error.hpp"
#include "kwstega/text.hpp"

namespace kwstega {
namespace {

std::string json_string(const std::string& s) {
  try {
    return nlohmann::json(s).dump();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidCatalog, std::string("text is not valid UTF-8: ") + e.what());
  }
}

bool parse_positive_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) return false;
  if (!std::isfinite(value) || value <= 0) return false;
  out = value;
  return true;
}

// role -> (surface, weight) in reply order
using RawEntries = std::array<std::vector<std::pair<std::string, double>>, 4>;

RawEntries parse_weighted_block(std::string_view reply, std::string_view tag) {
  auto entries = parse_answer_block(reply, tag);
  if (!entries) fail(ErrorCode::MalformedReply, "reply has no well-formed <" + std::string(tag) + "> block");
  RawEntries raw;
  for (const auto& [key, value] : *entries) {
    auto role = parse_keyword_role(key);
    if (!role) fail(ErrorCode::MalformedReply, "unknown role '" + key + "'");
    auto bar = value.rfind('|');
    if (bar == std::string::npos) fail(ErrorCode::MalformedReply, "entry without '|': " + value);
    std::string surface = canonicalize(std::string_view(value).substr(0, bar));
    if (!is_valid_surface(surface)) fail(ErrorCode::MalformedReply, "invalid keyword '" + surface + "'");
    double weight = 0;
    if (!parse_positive_double(std::string_view(value).substr(bar + 1), weight)) {
      fail(ErrorCode::MalformedReply, "non-positive or unparsable number in '" + value + "'");
    }
    raw[index_of(*role)].emplace_back(std::move(surface), weight);
  }
  return raw;
}

std::vector<Keyword> normalized_entries(const std::vector<std::pair<std::string, double>>& raw) {
  std::vector<double> weights;
  for (const auto& e : raw) weights.push_back(e.second);
  auto probs = normalize_weights(weights);
  std::vector<Keyword> out;
  for (std::size_t i = 0; i < raw.size(); ++i) out.push_back({raw[i].first, probs[i]});
  return out;
}

std::array<KeywordSubset, 4> subsets_from(std::array<std::vector<Keyword>, 4> lists, ErrorCode on_error) {
  try {
    return {KeywordSubset(KeywordRole::subject, std::move(lists[0])),
            KeywordSubset(KeywordRole::predicate, std::move(lists[1])),
            KeywordSubset(KeywordRole::object, std::move(lists[2])),
            KeywordSubset(KeywordRole::emotion, std::move(lists[3]))};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidCatalog) throw;
    fail(on_error, e.what());
  }
}

std::string body_json(const std::string& theme, int version,
                      const std::array<std::vector<Keyword>, 4>& lists) {
  std::string out = "{\"theme\":" + json_string(theme) + ",\"version\":" + std::to_string(version) +
                    ",\"subsets\":{";
  for (auto role : kKeywordRoles) {
    if (role != KeywordRole::subject) out += ',';
    out += '"';
    out += to_string(role);
    out += "\":[";
    bool first = true;
    for (const auto& k : lists[index_of(role)]) {
      if (!first) out += ',';
      first = false;
      out += "{\"surface\":" + json_string(k.surface) +
             ",\"probability\":" + format_double(k.probability) + "}";
    }
    out += ']';
  }
  out += "}}";
  return out;
}

std::array<std::vector<Keyword>, 4> lists_of(const std::array<KeywordSubset, 4>& subsets) {
  std::array<std::vector<Keyword>, 4> lists;
  for (auto role : kKeywordRoles) {
    const auto& s = subsets[index_of(role)];
    lists[index_of(role)].assign(s.entries().begin(), s.entries().end());
  }
  return lists;
}

}  // namespace

std::vector<double> normalize_weights(std::span<const double> weights) {
  if (weights.empty()) fail(ErrorCode::InvalidArgument, "no weights to normalize");
  double sum = 0;
  for (double w : weights) {
    if (!std::isfinite(w) || w <= 0) fail(ErrorCode::InvalidArgument, "weights must be finite and positive");
    sum += w;
  }
  std::vector<double> out;
  out.reserve(weights.size());
  for (double w : weights) out.push_back(w / sum);
  return out;
}

bool is_valid_surface(std::string_view surface) noexcept {
  if (surface.empty()) return false;
  if (canonicalize(surface) != surface) return false;
  return surface.find_first_of(",|:<>") == std::string_view::npos;
}

KeywordSubset::KeywordSubset(KeywordRole role, std::vector<Keyword> entries)
    : role_(role), entries_(std::move(entries)) {
  const auto want = expected_entry_count(role_);
  if (entries_.size() != want) {
    fail(ErrorCode::InvalidCatalog, std::string(to_string(role_)) + " subset needs " +
                                        std::to_string(want) + " entries, got " +
                                        std::to_string(entries_.size()));
  }
  std::unordered_set<std::string> seen;
  double sum = 0;
  for (const auto& k : entries_) {
    if (!is_valid_surface(k.surface)) fail(ErrorCode::InvalidCatalog, "invalid surface '" + k.surface + "'");
    if (!seen.insert(k.surface).second) fail(ErrorCode::InvalidCatalog, "duplicate surface '" + k.surface + "'");
    if (!std::isfinite(k.probability) || k.probability <= 0 || k.probability > 1) {
      fail(ErrorCode::InvalidCatalog, "probability of '" + k.surface + "' outside (0, 1]");
    }
    sum += k.probability;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    fail(ErrorCode::InvalidCatalog, std::string(to_string(role_)) + " probabilities sum to " +
                                        format_double(sum));
  }
}

std::vector<std::string> KeywordSubset::surfaces() const {
  std::vector<std::string> out;
  for (const auto& k : entries_) out.push_back(k.surface);
  return out;
}

std::vector<double> KeywordSubset::probabilities() const {
  std::vector<double> out;
  for (const auto& k : entries_) out.push_back(k.probability);
  return out;
}

KeywordCatalog::KeywordCatalog(std::string theme, std::array<KeywordSubset, 4> subsets, int version)
    : theme_(std::move(theme)), subsets_(std::move(subsets)), version_(version) {
  if (trim(theme_).empty()) fail(ErrorCode::InvalidCatalog, "empty theme");
  if (version_ < 1) fail(ErrorCode::VersionUnsupported, "catalog version " + std::to_string(version_));
  for (auto role : kKeywordRoles) {
    if (subsets_[index_of(role)].role() != role) fail(ErrorCode::InvalidCatalog, "subsets out of role order");
  }
  fingerprint_ = sha256_hex(canonical_body());
}

std::string KeywordCatalog::canonical_body() const {
  return body_json(theme_, version_, lists_of(subsets_));
}

std::string KeywordCatalog::serialize() const {
  std::string out = "{\n  \"theme\": " + json_string(theme_) + ",\n  \"version\": " +
                    std::to_string(version_) + ",\n  \"subsets\": {\n";
  for (auto role : kKeywordRoles) {
    out += "    \"";
    out += to_string(role);
    out += "\": [\n";
    const auto entries = subset(role).entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out += "      {\"surface\": " + json_string(entries[i].surface) +
             ", \"probability\": " + format_double(entries[i].probability) + "}";
      out += i + 1 < entries.size() ? ",\n" : "\n";
    }
    out += role == KeywordRole::emotion ? "    ]\n" : "    ],\n";
  }
  out += "  },\n  \"fingerprint\": \"" + fingerprint_ + "\"\n}\n";
  return out;
}

Variables KeywordCatalog::prompt_variables() const {
  Variables vars;
  for (auto role : kKeywordRoles) {
    std::string list;
    for (const auto& k : subset(role).entries()) {
      if (!list.empty()) list += ", ";
      list += k.surface;
    }
    vars[std::string(to_string(role))] = std::move(list);
  }
  vars["theme"] = theme_;
  return vars;
}

KeywordCatalog parse_keyword_reply(std::string_view reply, std::string_view theme) {
  auto raw = parse_weighted_block(reply, "keywords");
  std::array<std::vector<Keyword>, 4> lists;
  for (auto role : kKeywordRoles) {
    const auto& entries = raw[index_of(role)];
    if (entries.size() != expected_entry_count(role)) {
      fail(ErrorCode::MalformedReply, "expected " + std::to_string(expected_entry_count(role)) + " " +
                                          std::string(to_string(role)) + " entries, got " +
                                          std::to_string(entries.size()));
    }
    lists[index_of(role)] = normalized_entries(entries);
  }
  return KeywordCatalog(std::string(theme), subsets_from(std::move(lists), ErrorCode::MalformedReply), 1);
}

KeywordCatalog build_catalog(LlmProvider& provider, const PromptLibrary& prompts, std::string_view theme) {
  if (trim(theme).empty()) fail(ErrorCode::InvalidArgument, "theme is required");
  Variables vars{{"theme", std::string(theme)}};
  auto prompt = prompts.active(PromptRole::keyword).render(vars);
  auto reply = provider.complete({Purpose::keyword, std::move(prompt), std::move(vars)});
  return parse_keyword_reply(reply, theme);
}

KeywordCatalog optimize_probabilities(LlmProvider& provider, const PromptLibrary& prompts,
                                      const KeywordCatalog& catalog) {
  auto vars = catalog.prompt_variables();
  auto prompt = prompts.active(PromptRole::evaluation).render(vars);
  auto reply = provider.complete({Purpose::evaluation, std::move(prompt), std::move(vars)});
  auto raw = parse_weighted_block(reply, "scores");

  std::array<std::vector<Keyword>, 4> lists;
  for (auto role : kKeywordRoles) {
    const auto& subset = catalog.subset(role);
    const auto& scored = raw[index_of(role)];
    if (scored.size() != subset.size()) {
      fail(ErrorCode::MalformedReply, "expected " + std::to_string(subset.size()) + " " +
                                          std::string(to_string(role)) + " scores, got " +
                                          std::to_string(scored.size()));
    }
    std::vector<double> weights;
    for (const auto& k : subset.entries()) {
      auto it = std::find_if(scored.begin(), scored.end(), [&](const auto& e) { return e.first == k.surface; });
      if (it == scored.end()) fail(ErrorCode::MalformedReply, "no score for '" + k.surface + "'");
      if (std::count_if(scored.begin(), scored.end(), [&](const auto& e) { return e.first == k.surface; }) != 1) {
        fail(ErrorCode::MalformedReply, "'" + k.surface + "' scored more than once");
      }
      weights.push_back(it->second);
    }
    auto probs = normalize_weights(weights);
    auto& out = lists[index_of(role)];
    for (std::size_t i = 0; i < subset.size(); ++i) out.push_back({subset.entries()[i].surface, probs[i]});
  }
  return KeywordCatalog(catalog.theme(), subsets_from(std::move(lists), ErrorCode::MalformedReply),
                        catalog.version() + 1);
}

KeywordCatalog parse_catalog(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidCatalog, std::string("catalog is not valid JSON: ") + e.what());
  }
  std::string theme;
  int version = 0;
  std::string fingerprint;
  std::array<std::vector<Keyword>, 4> lists;
  try {
    theme = doc.at("theme").get<std::string>();
    version = doc.at("version").get<int>();
    fingerprint = doc.at("fingerprint").get<std::string>();
    if (version < 1) fail(ErrorCode::VersionUnsupported, "catalog version " + std::to_string(version));
    const auto& subsets = doc.at("subsets");
    if (!subsets.is_object() || subsets.size() != 4) fail(ErrorCode::InvalidCatalog, "subsets must have four roles");
    for (auto role : kKeywordRoles) {
      for (const auto& entry : subsets.at(std::string(to_string(role)))) {
        lists[index_of(role)].push_back(
            {entry.at("surface").get<std::string>(), entry.at("probability").get<double>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidCatalog, std::string("catalog schema: ") + e.what());
  }
  // Check the digest over the values exactly as stored, before any validation
  // could reject or normalize them.
  if (sha256_hex(body_json(theme, version, lists)) != fingerprint) {
    fail(ErrorCode::FingerprintMismatch, "catalog contents do not match fingerprint " + fingerprint);
  }
  return KeywordCatalog(std::move(theme), subsets_from(std::move(lists), ErrorCode::InvalidCatalog), version);
}

void save_catalog(const KeywordCatalog& catalog, const std::filesystem::path& destination) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + destination.string());
  out << catalog.serialize();
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write failed for " + destination.string());
}

KeywordCatalog load_catalog(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + source.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str());
}

}  // namespace kwstega
