#include "kwstega/prompts.hpp"

#include <algorithm>

#include "kwstega/error.hpp"

namespace kwstega {
namespace {

constexpr std::array<std::string_view, 9> kKnown = {
    "theme", "subject", "predicate", "object", "emotion", "stego_text", "expected", "got", "max_len"};

constexpr std::array<std::string_view, 1> kKeywordReq = {"theme"};
constexpr std::array<std::string_view, 5> kEvaluationReq = {"theme", "subject", "predicate", "object",
                                                            "emotion"};
constexpr std::array<std::string_view, 6> kSentenceReq = {"theme",  "subject", "predicate",
                                                          "object", "emotion", "max_len"};
constexpr std::array<std::string_view, 1> kExtractionReq = {"stego_text"};
constexpr std::array<std::string_view, 3> kFeedbackReq = {"stego_text", "expected", "got"};

struct Placeholder {
  std::size_t begin;  // position of '{'
  std::size_t end;    // one past '}'
  std::string_view name;
};

bool is_ident_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

std::vector<Placeholder> scan(std::string_view body) {
  std::vector<Placeholder> out;
  std::size_t i = 0;
  while ((i = body.find('{', i)) != std::string_view::npos) {
    std::size_t j = i + 1;
    while (j < body.size() && is_ident_char(body[j])) ++j;
    if (j > i + 1 && j < body.size() && body[j] == '}') {
      out.push_back({i, j + 1, body.substr(i + 1, j - i - 1)});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

std::size_t slot(PromptRole role) { return static_cast<std::size_t>(role); }

// Built-in templates. Tier 0 is the plain instruction, tier 1 adds explicit
// constraints after the first round of failures, tier 2 pins the output form
// tightly enough that extraction is nearly mechanical.
struct TierSet {
  std::array<std::string_view, kBuiltinTiers> bodies;
};

const std::array<TierSet, 6>& builtin_bodies() {
  static const std::array<TierSet, 6> sets = {{
      // keyword
      {{
          "You write short sentences about the theme \"{theme}\".\n"
          "List 16 subjects, 16 predicates (verbs) and 16 objects that are most likely to appear "
          "in such sentences, each with the probability that you would use it. Also give the "
          "three emotions negative, positive and neutral with their probabilities.\n"
          "Answer with exactly one block in this form and nothing inside it except entries:\n"
          "<keywords>\n"
          "subject: <word> | <probability>\n"
          "... (16 subject lines, 16 predicate lines, 16 object lines, 3 emotion lines)\n"
          "</keywords>\n",
          "Theme: \"{theme}\".\n"
          "Produce four keyword sets for writing one-sentence posts on this theme. Subjects are "
          "people or organisations, predicates are past-tense verbs, objects are nouns. Every word "
          "must be a single common lowercase word, distinct within its set, and usable with every "
          "other set. Emotions are exactly negative, positive and neutral.\n"
          "Give each word a probability greater than zero.\n"
          "Answer with exactly one block in this form and nothing inside it except entries:\n"
          "<keywords>\n"
          "subject: <word> | <probability>\n"
          "... (16 subject lines, 16 predicate lines, 16 object lines, 3 emotion lines)\n"
          "</keywords>\n",
          "Theme: \"{theme}\".\n"
          "Build the keyword sets used to steer generated posts. Requirements:\n"
          "1. 16 subjects, 16 predicates, 16 objects; one lowercase word each; no word in two sets.\n"
          "2. Any subject + predicate + object combination must read naturally.\n"
          "3. Emotions: negative, positive, neutral.\n"
          "4. Probabilities reflect how often the word appears in real posts on the theme and are "
          "strictly positive.\n"
          "Answer with exactly one block in this form and nothing inside it except entries:\n"
          "<keywords>\n"
          "subject: <word> | <probability>\n"
          "... (16 subject lines, 16 predicate lines, 16 object lines, 3 emotion lines)\n"
          "</keywords>\n",
      }},
      // evaluation
      {{
          "Theme: \"{theme}\".\n"
          "Subjects: {subject}\nPredicates: {predicate}\nObjects: {object}\nEmotions: {emotion}\n"
          "Score how well each word fits sentences on the theme when combined with random words "
          "from the other sets. Use positive numbers; higher is better.\n"
          "Answer with one block:\n<scores>\nsubject: <word> | <score>\n...\n</scores>\n",
          "Theme: \"{theme}\".\n"
          "Subjects: {subject}\nPredicates: {predicate}\nObjects: {object}\nEmotions: {emotion}\n"
          "Random combinations of these words will be turned into single sentences. Score every "
          "word by how rarely it produces an unclear or illogical sentence. Scores must be "
          "positive. Score every listed word exactly once and do not add words.\n"
          "Answer with one block:\n<scores>\nsubject: <word> | <score>\n...\n</scores>\n",
          "Theme: \"{theme}\".\n"
          "Subjects: {subject}\nPredicates: {predicate}\nObjects: {object}\nEmotions: {emotion}\n"
          "For each word, estimate the share of natural posts on the theme that would use it, "
          "penalising words that make random combinations illogical. Return a positive score for "
          "every listed word exactly once, spelled exactly as listed.\n"
          "Answer with one block:\n<scores>\nsubject: <word> | <score>\n...\n</scores>\n",
      }},
      // embedding
      {{
          "Write one sentence about \"{theme}\" of at most {max_len} words. It must use the "
          "subject \"{subject}\", the predicate \"{predicate}\", the object \"{object}\" and convey "
          "a {emotion} emotion. Reply with the sentence only.\n",
          "Write one natural, varied sentence such as a news post about \"{theme}\", at most "
          "{max_len} words. Use the exact words \"{subject}\" (subject), \"{predicate}\" "
          "(predicate) and \"{object}\" (object), and let the tone be clearly {emotion}. Do not "
          "use other words from the same categories. Reply with the sentence only.\n",
          "Write one sentence (at most {max_len} words) that a reader would take for a real post "
          "about \"{theme}\". Hard constraints: the main subject is the word \"{subject}\", the "
          "main verb is the word \"{predicate}\", the direct object is the word \"{object}\", the "
          "overall tone is {emotion}, and each of these words appears exactly once, spelled as "
          "given. Enrich the sentence with details but no competing subjects or verbs. Reply with "
          "the sentence only.\n",
      }},
      // generation
      {{
          "Rewrite as one sentence about \"{theme}\" of at most {max_len} words using the "
          "subject \"{subject}\", the predicate \"{predicate}\", the object \"{object}\" and a "
          "{emotion} emotion. Reply with the sentence only.\n",
          "The previous sentence did not carry the keywords clearly. Write one new sentence about "
          "\"{theme}\", at most {max_len} words, whose subject is \"{subject}\", whose verb is "
          "\"{predicate}\", whose object is \"{object}\", with an unmistakably {emotion} tone. "
          "Reply with the sentence only.\n",
          "Write one sentence of at most {max_len} words about \"{theme}\". Structure: "
          "\"{subject}\" as grammatical subject, \"{predicate}\" as the only main verb, "
          "\"{object}\" as its direct object, {emotion} tone stated plainly. Use each keyword "
          "exactly once and spelled exactly as given. Reply with the sentence only.\n",
      }},
      // extraction
      {{
          "Read the sentence and name its subject, predicate, object and emotion (negative, "
          "positive or neutral).\nSentence: {stego_text}\n"
          "Answer with one block:\n<answer>\nsubject: <word>\npredicate: <word>\nobject: "
          "<word>\nemotion: <word>\n</answer>\n",
          "Sentence: {stego_text}\n"
          "Identify the grammatical subject, main verb, direct object and overall emotion "
          "(negative, positive or neutral). Copy each word exactly as it appears, in its base "
          "dictionary form.\n"
          "Answer with one block:\n<answer>\nsubject: <word>\npredicate: <word>\nobject: "
          "<word>\nemotion: <word>\n</answer>\n",
          "Sentence: {stego_text}\n"
          "Extract the keywords it was built from. The subject is the main actor, the predicate "
          "the main verb in base form, the object what the verb acts on, and the emotion one of "
          "negative, positive, neutral. Give one lowercase word per line and nothing else.\n"
          "Answer with one block:\n<answer>\nsubject: <word>\npredicate: <word>\nobject: "
          "<word>\nemotion: <word>\n</answer>\n",
      }},
      // feedback
      {{
          "A sentence was meant to carry these keywords:\n{expected}\n"
          "An extractor read these instead:\n{got}\nSentence: {stego_text}\n"
          "Explain briefly why the extraction went wrong.\n",
          "Expected keywords:\n{expected}\nExtracted keywords:\n{got}\nSentence: {stego_text}\n"
          "Name each role that was extracted wrongly and the feature of the sentence that caused "
          "it, in two or three short sentences.\n",
          "Expected keywords:\n{expected}\nExtracted keywords:\n{got}\nSentence: {stego_text}\n"
          "Diagnose the mismatch role by role. For each wrong role say whether the keyword was "
          "missing, inflected, paraphrased or outcompeted by another word, and state one concrete "
          "rule that would prevent it.\n",
      }},
  }};
  return sets;
}

}  // namespace

std::string_view to_string(PromptRole role) noexcept {
  switch (role) {
    case PromptRole::keyword: return "keyword";
    case PromptRole::evaluation: return "evaluation";
    case PromptRole::embedding: return "embedding";
    case PromptRole::generation: return "generation";
    case PromptRole::extraction: return "extraction";
    case PromptRole::feedback: return "feedback";
  }
  return "unknown";
}

std::span<const std::string_view> known_placeholders() noexcept { return kKnown; }

std::span<const std::string_view> required_placeholders(PromptRole role) noexcept {
  switch (role) {
    case PromptRole::keyword: return kKeywordReq;
    case PromptRole::evaluation: return kEvaluationReq;
    case PromptRole::embedding:
    case PromptRole::generation: return kSentenceReq;
    case PromptRole::extraction: return kExtractionReq;
    case PromptRole::feedback: return kFeedbackReq;
  }
  return {};
}

PromptTemplate::PromptTemplate(PromptRole role, std::string body, int revision, int tier)
    : role_(role), body_(std::move(body)), revision_(revision), tier_(tier) {
  if (body_.empty()) fail(ErrorCode::TemplateError, "empty template body");
  if (revision_ < 0) fail(ErrorCode::TemplateError, "negative revision");
  auto found = scan(body_);
  for (const auto& p : found) {
    if (std::find(kKnown.begin(), kKnown.end(), p.name) == kKnown.end()) {
      fail(ErrorCode::TemplateError, "unknown placeholder {" + std::string(p.name) + "}");
    }
  }
  for (auto req : required_placeholders(role_)) {
    bool present = std::any_of(found.begin(), found.end(), [&](const auto& p) { return p.name == req; });
    if (!present) {
      fail(ErrorCode::TemplateError, std::string(to_string(role_)) + " template lacks {" +
                                         std::string(req) + "}");
    }
  }
}

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> names;
  for (const auto& p : scan(body_)) {
    std::string name(p.name);
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
  }
  return names;
}

std::string PromptTemplate::render(const Variables& vars) const {
  std::string out;
  out.reserve(body_.size() + 256);
  std::size_t cursor = 0;
  for (const auto& p : scan(body_)) {
    auto it = vars.find(p.name);
    if (it == vars.end()) {
      fail(ErrorCode::TemplateError, "unresolved placeholder {" + std::string(p.name) + "} in " +
                                         std::string(to_string(role_)) + " template");
    }
    out.append(body_, cursor, p.begin - cursor);
    out += it->second;
    cursor = p.end;
  }
  out.append(body_, cursor, std::string::npos);
  return out;
}

const PromptTemplate& builtin_template(PromptRole role, int tier) {
  static const auto table = [] {
    std::vector<std::vector<PromptTemplate>> t;
    for (auto r : kPromptRoles) {
      std::vector<PromptTemplate> tiers;
      for (int i = 0; i < kBuiltinTiers; ++i) {
        tiers.emplace_back(r, std::string(builtin_bodies()[slot(r)].bodies[static_cast<std::size_t>(i)]),
                           0, i);
      }
      t.push_back(std::move(tiers));
    }
    return t;
  }();
  tier = std::clamp(tier, 0, kBuiltinTiers - 1);
  return table[slot(role)][static_cast<std::size_t>(tier)];
}

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  for (auto role : kPromptRoles) lib.history_[slot(role)].push_back(builtin_template(role, 0));
  return lib;
}

const PromptTemplate& PromptLibrary::active(PromptRole role) const {
  return history_[slot(role)].back();
}

const std::vector<PromptTemplate>& PromptLibrary::history(PromptRole role) const {
  return history_[slot(role)];
}

void PromptLibrary::append(PromptTemplate revision) {
  auto& hist = history_[slot(revision.role())];
  if (revision.revision() <= hist.back().revision()) {
    fail(ErrorCode::TemplateError, "revision must increase: " + std::to_string(revision.revision()) +
                                       " <= " + std::to_string(hist.back().revision()));
  }
  hist.push_back(std::move(revision));
}

void PromptLibrary::override_body(PromptRole role, std::string body) {
  const auto& current = active(role);
  append(PromptTemplate(role, std::move(body), current.revision() + 1, current.tier()));
}

}  // namespace kwstega
