#include "kwstega/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include <json.hpp>

#include "kwstega/codec.hpp"
#include "kwstega/error.hpp"
#include "kwstega/text.hpp"

namespace kwstega {
namespace {

using namespace std::chrono;

sys_seconds to_sys(const TimeCode& t) {
  const year_month_day ymd{year{2000 + t.yy}, month{t.mm}, day{t.dd}};
  if (!ymd.ok()) fail(ErrorCode::InvalidTimeCode, "no such date: " + t.to_string());
  return sys_days{ymd} + hours{t.hh} + minutes{t.mi} + seconds{t.ss};
}

TimeCode from_sys(sys_seconds s) {
  const auto day_start = floor<days>(s);
  const year_month_day ymd{day_start};
  const hh_mm_ss tod{s - day_start};
  const int y = static_cast<int>(ymd.year());
  if (y < 2000 || y > 2099) fail(ErrorCode::InvalidTimeCode, "year " + std::to_string(y) + " outside 2000-2099");
  return TimeCode{static_cast<std::uint8_t>(y - 2000),
                  static_cast<std::uint8_t>(static_cast<unsigned>(ymd.month())),
                  static_cast<std::uint8_t>(static_cast<unsigned>(ymd.day())),
                  static_cast<std::uint8_t>(tod.hours().count()),
                  static_cast<std::uint8_t>(tod.minutes().count()),
                  static_cast<std::uint8_t>(tod.seconds().count())};
}

std::size_t slot(PromptRole r) { return static_cast<std::size_t>(r); }

}  // namespace

TimeCode add_seconds(const TimeCode& t, long long secs) { return from_sys(to_sys(t) + seconds{secs}); }

TimeCode SystemClock::now() { return from_sys(floor<seconds>(system_clock::now())); }

SteppingClock::SteppingClock(TimeCode start, int step_seconds) : next_(start), step_(step_seconds) {
  to_sys(start);
  if (step_seconds < 0) fail(ErrorCode::InvalidArgument, "clock step must be non-negative");
}

TimeCode SteppingClock::now() {
  auto current = next_;
  next_ = add_seconds(next_, step_);
  return current;
}

double RunReport::reject_rate() const noexcept {
  return generations == 0 ? 0.0 : static_cast<double>(rejections) / static_cast<double>(generations);
}

double RunReport::mean_iterations() const noexcept {
  if (iterations.empty()) return 0.0;
  double sum = 0;
  for (int i : iterations) sum += i;
  return sum / static_cast<double>(iterations.size());
}

double RunReport::embedding_capacity() const {
  if (total_words == 0) fail(ErrorCode::ZeroWords, "no words in stego text");
  return static_cast<double>(embedded_bits) / static_cast<double>(total_words);
}

std::string RunReport::summary() const {
  std::ostringstream out;
  out << "sentences:        " << iterations.size() << '\n'
      << "generations:      " << generations << '\n'
      << "rejections:       " << rejections << '\n'
      << "reject rate:      " << reject_rate() << '\n'
      << "mean iterations:  " << mean_iterations() << '\n'
      << "total words:      " << total_words << '\n'
      << "payload bits:     " << payload_bits << '\n'
      << "embedded bits:    " << embedded_bits << '\n';
  if (total_words > 0) out << "EC (bpw):         " << embedding_capacity() << '\n';
  out << "prompt revisions:";
  for (auto role : kPromptRoles) out << ' ' << to_string(role) << '=' << final_revisions[slot(role)];
  out << '\n';
  return out.str();
}

std::string RunReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["sentences"] = iterations.size();
  doc["iterations"] = iterations;
  doc["generations"] = generations;
  doc["rejections"] = rejections;
  doc["reject_rate"] = reject_rate();
  doc["total_words"] = total_words;
  doc["payload_bits"] = payload_bits;
  doc["embedded_bits"] = embedded_bits;
  if (total_words > 0) doc["ec_bpw"] = embedding_capacity();
  nlohmann::ordered_json revs;
  for (auto role : kPromptRoles) revs[std::string(to_string(role))] = final_revisions[slot(role)];
  doc["prompt_revisions"] = std::move(revs);
  return doc.dump();
}

EmbedResult embed_pipeline(std::span<const std::uint8_t> payload, PrivateKey key, LlmProvider& provider,
                           const KeywordCatalog& catalog, const SessionConfig& session, PromptLibrary& prompts) {
  if (session.max_iterations < 1) fail(ErrorCode::InvalidArgument, "max iterations must be >= 1");
  if (session.max_len < 1) fail(ErrorCode::InvalidArgument, "max length must be >= 1");
  auto clock = session.clock ? session.clock : std::make_shared<SystemClock>();
  const std::string theme = session.theme.empty() ? catalog.theme() : session.theme;
  const AugmentedCatalog augs(catalog);
  const auto candidates = catalog.prompt_variables();

  EmbedResult result;
  auto& report = result.report;
  const auto chunks = split_chunks(frame(payload).bitstream);
  report.payload_bits = payload.size() * 8;
  report.embedded_bits = chunks.size() * kGroupBits;

  for (std::size_t seq = 0; seq < chunks.size(); ++seq) {
    const auto plan = plan_sentence(chunks[seq], augs);
    auto text = generate_stego_text(provider, prompts.active(PromptRole::embedding), plan.keywords, theme,
                                    session.max_len);
    int iteration = 1;
    ++report.generations;
    while (true) {
      auto got = extract_keywords(provider, prompts.active(PromptRole::extraction), text, candidates);
      if (got.ok() && *got.keywords == plan.keywords) break;

      ++report.rejections;
      if (iteration >= session.max_iterations) {
        fail(ErrorCode::MaxRejectionsExceeded, "sentence " + std::to_string(seq) + " still rejected after " +
                                                   std::to_string(iteration) + " generations");
      }
      auto feedback = request_feedback(provider, prompts.active(PromptRole::feedback), text, plan.keywords, got);
      optimize_prompt(provider, feedback, prompts, PromptRole::generation);
      optimize_prompt(provider, feedback, prompts, PromptRole::embedding);
      optimize_prompt(provider, feedback, prompts, PromptRole::extraction);
      text = generate_stego_text(provider, prompts.active(PromptRole::generation), plan.keywords, theme,
                                 session.max_len);
      ++iteration;
      ++report.generations;
    }

    const auto time = clock->now();
    Envelope env;
    env.sequence = static_cast<std::uint32_t>(seq);
    env.stego_text = text;
    env.timecode = time;
    env.stamps = encrypt_offsets(plan.re_idx, key, time);
    env.fingerprint = catalog.fingerprint();
    env.theme = theme;
    result.envelopes.push_back(std::move(env));
    report.iterations.push_back(iteration);
    report.total_words += count_words(text);
  }
  for (auto role : kPromptRoles) report.final_revisions[slot(role)] = prompts.active(role).revision();
  return result;
}

EmbedResult embed_pipeline(std::span<const std::uint8_t> payload, PrivateKey key, LlmProvider& provider,
                           const KeywordCatalog& catalog, const SessionConfig& session) {
  auto prompts = PromptLibrary::builtin();
  return embed_pipeline(payload, key, provider, catalog, session, prompts);
}

std::vector<std::uint8_t> extract_pipeline(std::span<const Envelope> envelopes, PrivateKey key,
                                           LlmProvider& provider, const KeywordCatalog& catalog,
                                           const PromptLibrary& prompts) {
  for (const auto& e : envelopes) {
    if (e.fingerprint != catalog.fingerprint()) {
      fail(ErrorCode::FingerprintMismatch, "envelope " + std::to_string(e.sequence) + " was made with catalog " +
                                               e.fingerprint + ", have " + catalog.fingerprint());
    }
  }
  std::vector<const Envelope*> ordered;
  for (const auto& e : envelopes) ordered.push_back(&e);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->sequence < b->sequence; });
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (ordered[i]->sequence != i) {
      fail(ErrorCode::MissingSequence, "expected sequence " + std::to_string(i) + ", found " +
                                           std::to_string(ordered[i]->sequence));
    }
  }

  const AugmentedCatalog augs(catalog);
  const auto candidates = catalog.prompt_variables();
  std::vector<ReceivedSentence> received;
  received.reserve(ordered.size());
  for (const auto* e : ordered) {
    auto got = extract_keywords(provider, prompts.active(PromptRole::extraction), e->stego_text, candidates);
    if (!got.ok()) {
      fail(ErrorCode::ExtractionFailed, "envelope " + std::to_string(e->sequence) + ": " + got.failure);
    }
    received.push_back({*got.keywords, e->stamps, e->timecode});
  }
  return decode_message(received, key, augs);
}

std::vector<std::uint8_t> extract_pipeline(std::span<const Envelope> envelopes, PrivateKey key,
                                           LlmProvider& provider, const KeywordCatalog& catalog) {
  return extract_pipeline(envelopes, key, provider, catalog, PromptLibrary::builtin());
}

}  // namespace kwstega
