#include "kwstega/provider.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "kwstega/error.hpp"
#include "kwstega/log.hpp"
#include "kwstega/text.hpp"

namespace kwstega {
namespace {

constexpr std::string_view kOptimizeInstruction =
    "You maintain a prompt template used to make a language model write or read sentences.\n"
    "Template role: {role}\n"
    "Current template:\n<template>\n{body}\n</template>\n"
    "Feedback from the last failed attempt:\n{feedback}\n"
    "Rewrite the template so the failure does not recur. Keep every placeholder written in "
    "braces exactly as it is, e.g. {{subject}}. Answer with the full new template inside "
    "<template> and </template>.\n";

std::string build_optimize_prompt(const PromptTemplate& current, std::string_view feedback) {
  std::string out;
  std::string_view text = kOptimizeInstruction;
  // Tiny fixed expansion; the instruction is not a PromptTemplate because it
  // must be able to quote placeholders literally.
  while (!text.empty()) {
    auto brace = text.find('{');
    if (brace == std::string_view::npos) {
      out.append(text);
      break;
    }
    out.append(text.substr(0, brace));
    text.remove_prefix(brace);
    if (text.starts_with("{{")) {
      auto close = text.find("}}");
      out += '{';
      out.append(text.substr(2, close - 2));
      out += '}';
      text.remove_prefix(close + 2);
    } else if (text.starts_with("{role}")) {
      out.append(to_string(current.role()));
      text.remove_prefix(6);
    } else if (text.starts_with("{body}")) {
      out.append(current.body());
      text.remove_prefix(6);
    } else if (text.starts_with("{feedback}")) {
      out.append(feedback);
      text.remove_prefix(10);
    } else {
      out += '{';
      text.remove_prefix(1);
    }
  }
  return out;
}

std::optional<std::string> extract_block_body(std::string_view reply, std::string_view tag) {
  std::string open = "<" + std::string(tag) + ">";
  std::string close = "</" + std::string(tag) + ">";
  auto b = reply.find(open);
  if (b == std::string_view::npos) return std::nullopt;
  auto start = b + open.size();
  auto e = reply.find(close, start);
  if (e == std::string_view::npos) return std::nullopt;
  return std::string(reply.substr(start, e - start));
}

std::string single_line(std::string_view text) {
  std::string out;
  for (auto& w : split_words(text)) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string describe_got(const ExtractionResult& got) {
  if (got.ok()) return format_tuple(*got.keywords);
  return "(unparsable reply: " + got.failure + ")\n";
}

}  // namespace

std::string_view to_string(Purpose purpose) noexcept {
  switch (purpose) {
    case Purpose::keyword: return "keyword";
    case Purpose::evaluation: return "evaluation";
    case Purpose::embedding: return "embedding";
    case Purpose::generation: return "generation";
    case Purpose::extraction: return "extraction";
    case Purpose::feedback: return "feedback";
    case Purpose::optimize: return "optimize";
  }
  return "unknown";
}

Purpose purpose_of(PromptRole role) noexcept {
  switch (role) {
    case PromptRole::keyword: return Purpose::keyword;
    case PromptRole::evaluation: return Purpose::evaluation;
    case PromptRole::embedding: return Purpose::embedding;
    case PromptRole::generation: return Purpose::generation;
    case PromptRole::extraction: return Purpose::extraction;
    case PromptRole::feedback: return Purpose::feedback;
  }
  return Purpose::optimize;
}

TranscriptProvider::TranscriptProvider(LlmProvider& inner, std::filesystem::path run_dir)
    : inner_(inner), run_dir_(std::move(run_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(run_dir_, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create transcript directory " + run_dir_.string());
}

std::string TranscriptProvider::complete(const CompletionRequest& request) {
  std::size_t n;
  {
    std::lock_guard lock(mutex_);
    n = ++counter_;
  }
  char name[64];
  std::snprintf(name, sizeof name, "%04zu-%s.txt", n, std::string(to_string(request.purpose)).c_str());
  std::ofstream out(run_dir_ / name, std::ios::binary);
  out << "=== prompt\n" << request.prompt << "\n";
  try {
    auto reply = inner_.complete(request);
    out << "=== reply\n" << reply << "\n";
    return reply;
  } catch (const Error& e) {
    out << "=== error\n" << e.what() << "\n";
    throw;
  }
}

std::optional<std::vector<std::pair<std::string, std::string>>> parse_answer_block(
    std::string_view reply, std::string_view tag) {
  auto body = extract_block_body(reply, tag);
  if (!body) return std::nullopt;
  std::vector<std::pair<std::string, std::string>> entries;
  std::string_view rest = *body;
  while (!rest.empty()) {
    auto nl = rest.find('\n');
    std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    entries.emplace_back(canonicalize(line.substr(0, colon)), std::string(trim(line.substr(colon + 1))));
  }
  return entries;
}

ExtractionResult ExtractionResult::parsed(KeywordTuple tuple, std::string raw) {
  return ExtractionResult{std::move(tuple), std::move(raw), {}};
}

ExtractionResult ExtractionResult::parse_failure(std::string reason, std::string raw) {
  return ExtractionResult{std::nullopt, std::move(raw), std::move(reason)};
}

ExtractionResult parse_extraction_reply(std::string_view reply) {
  auto entries = parse_answer_block(reply, "answer");
  if (!entries) return ExtractionResult::parse_failure("no well-formed <answer> block", std::string(reply));
  KeywordTuple tuple;
  std::array<bool, 4> seen{};
  for (const auto& [key, value] : *entries) {
    auto role = parse_keyword_role(key);
    if (!role) return ExtractionResult::parse_failure("unknown role '" + key + "'", std::string(reply));
    if (seen[index_of(*role)]) {
      return ExtractionResult::parse_failure("duplicate role '" + key + "'", std::string(reply));
    }
    auto surface = canonicalize(value);
    if (surface.empty()) {
      return ExtractionResult::parse_failure("empty value for '" + key + "'", std::string(reply));
    }
    seen[index_of(*role)] = true;
    tuple[*role] = std::move(surface);
  }
  for (auto role : kKeywordRoles) {
    if (!seen[index_of(role)]) {
      return ExtractionResult::parse_failure("missing role '" + std::string(to_string(role)) + "'",
                                             std::string(reply));
    }
  }
  return ExtractionResult::parsed(std::move(tuple), std::string(reply));
}

std::string generate_stego_text(LlmProvider& provider, const PromptTemplate& tmpl,
                                const KeywordTuple& keywords, std::string_view theme, int max_len,
                                const Variables& extra) {
  if (tmpl.role() != PromptRole::embedding && tmpl.role() != PromptRole::generation) {
    fail(ErrorCode::TemplateError, "stego text needs an embedding or generation template, got " +
                                       std::string(to_string(tmpl.role())));
  }
  Variables vars = extra;
  for (auto role : kKeywordRoles) vars[std::string(to_string(role))] = keywords[role];
  vars["theme"] = std::string(theme);
  vars["max_len"] = std::to_string(max_len);
  auto prompt = tmpl.render(vars);
  auto reply = provider.complete({purpose_of(tmpl.role()), std::move(prompt), std::move(vars)});
  return single_line(reply);
}

ExtractionResult extract_keywords(LlmProvider& provider, const PromptTemplate& tmpl,
                                  std::string_view text, const Variables& extra) {
  if (tmpl.role() != PromptRole::extraction) {
    fail(ErrorCode::TemplateError, "extract_keywords needs an extraction template");
  }
  if (trim(text).empty()) return ExtractionResult::parse_failure("empty stego text", {});
  Variables vars = extra;
  vars["stego_text"] = std::string(text);
  auto prompt = tmpl.render(vars);
  auto reply = provider.complete({Purpose::extraction, std::move(prompt), std::move(vars)});
  return parse_extraction_reply(reply);
}

std::string request_feedback(LlmProvider& provider, const PromptTemplate& tmpl,
                             std::string_view text, const KeywordTuple& expected,
                             const ExtractionResult& got) {
  if (got.ok() && *got.keywords == expected) {
    throw std::logic_error("request_feedback called for a successful extraction");
  }
  if (tmpl.role() != PromptRole::feedback) {
    fail(ErrorCode::TemplateError, "request_feedback needs a feedback template");
  }
  Variables vars;
  vars["stego_text"] = std::string(text);
  vars["expected"] = format_tuple(expected);
  vars["got"] = describe_got(got);
  auto prompt = tmpl.render(vars);
  try {
    return provider.complete({Purpose::feedback, std::move(prompt), std::move(vars)});
  } catch (const Error& e) {
    if (!is_provider_error(e.code())) throw;
    log_warning(std::string("feedback request failed, using canned diagnosis: ") + e.what());
  }
  std::string canned = "Extraction did not match for:";
  for (auto role : kKeywordRoles) {
    if (!got.ok() || (*got.keywords)[role] != expected[role]) {
      canned += ' ';
      canned += to_string(role);
    }
  }
  canned += ". Use each keyword exactly once, spelled exactly as given.";
  return canned;
}

PromptTemplate optimize_prompt(LlmProvider& provider, std::string_view feedback,
                               PromptLibrary& library, PromptRole role) {
  const PromptTemplate current = library.active(role);
  std::optional<PromptTemplate> next;
  try {
    Variables vars;
    vars["role"] = std::string(to_string(role));
    vars["feedback"] = std::string(feedback);
    auto reply = provider.complete({Purpose::optimize, build_optimize_prompt(current, feedback), vars});
    if (auto body = extract_block_body(reply, "template")) {
      std::string trimmed(trim(*body));
      trimmed += '\n';
      next.emplace(role, std::move(trimmed), current.revision() + 1, current.tier());
    }
  } catch (const Error& e) {
    if (!is_provider_error(e.code()) && e.code() != ErrorCode::TemplateError) throw;
    log_warning(std::string("prompt optimization for ") + std::string(to_string(role)) +
                " fell back to built-in tier: " + e.what());
  }
  if (!next) {
    int tier = std::min(current.tier() + 1, kBuiltinTiers - 1);
    next.emplace(role, builtin_template(role, tier).body(), current.revision() + 1, tier);
  }
  library.append(*next);
  return *next;
}

}  // namespace kwstega
