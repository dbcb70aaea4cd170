#include "kwstega/mock_provider.hpp"

#include <algorithm>
#include <cctype>

#include "kwstega/error.hpp"
#include "kwstega/text.hpp"

namespace kwstega {
namespace {

constexpr std::array<std::string_view, 16> kSubjects = {
    "dancer",   "singer",  "actor", "actress", "director", "producer", "rapper",   "comedian",
    "drummer",  "band",    "studio", "critic", "host",     "model",    "composer", "choreographer"};
constexpr std::array<std::string_view, 16> kPredicates = {
    "announced", "released",  "unveiled", "praised", "criticized", "launched", "revealed", "celebrated",
    "premiered", "cancelled", "teased",   "shared",  "defended",   "postponed", "confirmed", "discussed"};
constexpr std::array<std::string_view, 16> kObjects = {
    "song",   "album",  "film",  "tour",    "trailer",  "series",   "concert",       "documentary",
    "single", "musical", "award", "sequel", "podcast",  "festival", "collaboration", "memoir"};
constexpr std::array<std::string_view, 3> kEmotions = {"positive", "neutral", "negative"};
constexpr std::array<std::string_view, 3> kEmotionWeights = {"0.5", "0.3", "0.2"};

constexpr std::array<std::string_view, 4> kFrames = {
    "The {subject} {predicate} the {object} today, and the reaction online was {emotion}.",
    "Yesterday the {subject} {predicate} a new {object}, a move observers called {emotion} overall.",
    "In a {emotion} turn for the week, the {subject} {predicate} the long awaited {object}.",
    "Fans reacted in a {emotion} way after the {subject} {predicate} the {object} on stage.",
};

constexpr std::array<std::array<std::string_view, 3>, 4> kFillers = {{
    {"someone", "somebody", "they"},
    {"mentioned", "noted", "did"},
    {"something", "thing", "it"},
    {"mixed", "unclear", "odd"},
}};

std::size_t slot(Purpose p) { return static_cast<std::size_t>(p); }

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> split_list(std::string_view list) {
  std::vector<std::string> out;
  while (!list.empty()) {
    auto comma = list.find(',');
    auto item = canonicalize(list.substr(0, comma));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return out;
}

std::string var(const Variables& vars, std::string_view key) {
  auto it = vars.find(key);
  return it == vars.end() ? std::string{} : it->second;
}

// Lowercased words with leading/trailing punctuation stripped.
std::vector<std::string> plain_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& w : split_words(canonicalize(text))) {
    std::size_t b = 0, e = w.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(w[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(w[e - 1]))) --e;
    if (e > b) out.push_back(w.substr(b, e - b));
  }
  return out;
}

// Longest candidate occurring as a whole-token sequence; earliest on ties.
std::optional<std::string> longest_match(const std::vector<std::string>& tokens,
                                         const std::vector<std::string>& candidates) {
  std::optional<std::string> best;
  std::size_t best_pos = 0;
  for (const auto& cand : candidates) {
    auto words = split_words(cand);
    if (words.empty() || words.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + words.size() <= tokens.size(); ++i) {
      if (!std::equal(words.begin(), words.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) continue;
      if (!best || cand.size() > best->size() || (cand.size() == best->size() && i < best_pos)) {
        best = cand;
        best_pos = i;
      }
      break;
    }
  }
  return best;
}

std::string fill_frame(std::string_view frame, const KeywordTuple& words) {
  std::string out;
  std::size_t i = 0;
  while (i < frame.size()) {
    if (frame[i] == '{') {
      auto close = frame.find('}', i);
      auto role = parse_keyword_role(frame.substr(i + 1, close - i - 1));
      out += words[*role];
      i = close + 1;
    } else {
      out += frame[i++];
    }
  }
  return out;
}

}  // namespace

MockProvider::MockProvider(MockOptions options) : options_(options), rng_(options.seed) {
  if (!(options_.drop_rate >= 0.0 && options_.drop_rate <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "drop rate must lie in [0, 1]");
  }
}

std::string MockProvider::keyword_fixture() {
  std::string out = "Here are the keyword sets.\n<keywords>\n";
  auto add = [&](std::string_view role, const auto& words) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      out += role;
      out += ": ";
      out += words[i];
      out += " | ";
      out += format_double(static_cast<double>(words.size() - i) / 10.0);
      out += '\n';
    }
  };
  add("subject", kSubjects);
  add("predicate", kPredicates);
  add("object", kObjects);
  for (std::size_t i = 0; i < kEmotions.size(); ++i) {
    out += "emotion: ";
    out += kEmotions[i];
    out += " | ";
    out += kEmotionWeights[i];
    out += '\n';
  }
  out += "</keywords>\n";
  return out;
}

double MockProvider::draw() {
  // 53 high bits -> [0, 1); identical on every platform, unlike
  // std::uniform_real_distribution.
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

std::string MockProvider::generate(const CompletionRequest& request) {
  KeywordTuple words;
  for (auto role : kKeywordRoles) words[role] = canonicalize(var(request.variables, to_string(role)));

  bool corrupt = false;
  if (options_.fail_first_attempt) {
    corrupt = request.purpose == Purpose::embedding;
  } else if (options_.drop_rate > 0.0) {
    corrupt = draw() < options_.drop_rate;
  }
  if (corrupt) {
    const auto role = kKeywordRoles[rng_() % 4];
    const auto& original = words[role];
    for (auto filler : kFillers[index_of(role)]) {
      if (filler != original) {
        words[role] = std::string(filler);
        break;
      }
    }
  }

  std::uint64_t h = fnv1a(format_tuple(words), options_.seed ^ 0x9e3779b97f4a7c15ull);
  return fill_frame(kFrames[h % kFrames.size()], words);
}

std::string MockProvider::complete(const CompletionRequest& request) {
  std::lock_guard lock(mutex_);
  ++calls_[slot(request.purpose)];
  const auto& vars = request.variables;

  switch (request.purpose) {
    case Purpose::keyword:
      return keyword_fixture();

    case Purpose::evaluation: {
      std::string out = "<scores>\n";
      for (auto role : kKeywordRoles) {
        for (const auto& w : split_list(var(vars, to_string(role)))) {
          out += std::string(to_string(role)) + ": " + w + " | 1\n";
        }
      }
      return out + "</scores>\n";
    }

    case Purpose::embedding:
    case Purpose::generation:
      return generate(request);

    case Purpose::extraction: {
      auto tokens = plain_tokens(var(vars, "stego_text"));
      std::string out = "<answer>\n";
      for (auto role : kKeywordRoles) {
        auto found = longest_match(tokens, split_list(var(vars, to_string(role))));
        if (found) out += std::string(to_string(role)) + ": " + *found + "\n";
      }
      return out + "</answer>\n";
    }

    case Purpose::feedback: {
      std::string expected = var(vars, "expected");
      std::string got = var(vars, "got");
      std::string out = "The extraction disagreed on:";
      for (auto role : kKeywordRoles) {
        auto line = std::string(to_string(role)) + ": ";
        auto pos_e = expected.find(line);
        auto pos_g = got.find(line);
        auto value = [&](const std::string& s, std::size_t pos) {
          if (pos == std::string::npos) return std::string{};
          auto start = pos + line.size();
          return s.substr(start, s.find('\n', start) - start);
        };
        if (value(expected, pos_e) != value(got, pos_g)) out += " " + std::string(to_string(role));
      }
      return out + ". The keyword was missing or replaced in the sentence.";
    }

    case Purpose::optimize:
      return "No rewrite available offline.";
  }
  return {};
}

std::size_t MockProvider::calls(Purpose purpose) const {
  std::lock_guard lock(mutex_);
  return calls_[slot(purpose)];
}

std::size_t MockProvider::total_calls() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (auto c : calls_) n += c;
  return n;
}

}  // namespace kwstega
