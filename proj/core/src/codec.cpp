#include "kwstega/codec.hpp"

#include <cassert>

#include "kwstega/error.hpp"
#include "kwstega/text.hpp"

namespace kwstega {

SentencePlan plan_sentence(const ChunkGroup& chunk, const AugmentedCatalog& augs) {
  SentencePlan plan;
  plan.lc_idx = chunk;
  for (auto role : kKeywordRoles) {
    const auto& aug = augs[role];
    assert(aug.capacity() == role_capacity(role));
    const auto& block = aug.block_at(chunk[role]);
    plan.keywords[role] = block.surface;
    plan.re_idx[role] = chunk[role] - block.base;
  }
  return plan;
}

ChunkGroup recover_chunk(const KeywordTuple& extracted, const StampSet& stamps, PrivateKey key,
                         const TimeCode& t, const AugmentedCatalog& augs) {
  // Resolve every surface before looking at offsets so an unknown keyword is
  // reported as such rather than as a stray offset.
  std::array<const KeywordBlock*, 4> blocks{};
  for (auto role : kKeywordRoles) blocks[index_of(role)] = &augs[role].block_of(canonicalize(extracted[role]));
  const auto offsets = decrypt_offsets(stamps, key, t);
  ChunkGroup chunk;
  for (auto role : kKeywordRoles) {
    const auto& block = *blocks[index_of(role)];
    if (offsets[role] >= block.length) {
      fail(ErrorCode::OffsetOutOfRange, std::string(to_string(role)) + " offset " + std::to_string(offsets[role]) +
                                            " outside block of length " + std::to_string(block.length) + " for '" +
                                            block.surface + "'");
    }
    chunk[role] = block.base + offsets[role];
  }
  return chunk;
}

std::vector<PlannedSentence> embed_message(std::span<const std::uint8_t> payload, PrivateKey key,
                                           std::span<const TimeCode> times, const AugmentedCatalog& augs) {
  const auto chunks = split_chunks(frame(payload).bitstream);
  if (times.size() != chunks.size()) {
    fail(ErrorCode::InvalidArgument, "need " + std::to_string(chunks.size()) + " timecodes, got " +
                                         std::to_string(times.size()));
  }
  std::vector<PlannedSentence> out;
  out.reserve(chunks.size());
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (i > 0 && times[i] < times[i - 1]) fail(ErrorCode::InvalidArgument, "timecodes must not decrease");
    auto plan = plan_sentence(chunks[i], augs);
    auto stamps = encrypt_offsets(plan.re_idx, key, times[i]);
    out.push_back({std::move(plan), stamps, times[i]});
  }
  return out;
}

std::vector<std::uint8_t> decode_message(std::span<const ReceivedSentence> sentences, PrivateKey key,
                                         const AugmentedCatalog& augs) {
  if (sentences.empty()) fail(ErrorCode::TruncatedStream, "no sentences");
  std::vector<ChunkGroup> chunks;
  chunks.reserve(sentences.size());
  for (const auto& s : sentences) chunks.push_back(recover_chunk(s.keywords, s.stamps, key, s.time, augs));
  return deframe(join_chunks(chunks));
}

}  // namespace kwstega
