#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kwstega/augment.hpp"
#include "kwstega/cipher.hpp"
#include "kwstega/roles.hpp"

namespace kwstega {

/// Keywords chosen for one sentence, with their location indices (the secret
/// bits themselves) and repetition offsets inside each keyword block.
struct SentencePlan {
  KeywordTuple keywords;
  ChunkGroup lc_idx;
  Offsets re_idx;

  bool operator==(const SentencePlan&) const = default;
};

SentencePlan plan_sentence(const ChunkGroup& chunk, const AugmentedCatalog& augs);

/// Rebuilds a chunk from extracted keywords and the envelope stamps.
/// UnknownKeyword if a surface is not in its subset, OffsetOutOfRange if the
/// decrypted offset does not fit the keyword's block (wrong key, wrong time or
/// a corrupted stamp).
ChunkGroup recover_chunk(const KeywordTuple& extracted, const StampSet& stamps, PrivateKey key,
                         const TimeCode& t, const AugmentedCatalog& augs);

struct PlannedSentence {
  SentencePlan plan;
  StampSet stamps;
  TimeCode time;
};

struct ReceivedSentence {
  KeywordTuple keywords;
  StampSet stamps;
  TimeCode time;
};

/// One plan per 64-bit group of the framed payload. `times` must hold one
/// non-decreasing timecode per sentence (see group_count()).
std::vector<PlannedSentence> embed_message(std::span<const std::uint8_t> payload, PrivateKey key,
                                           std::span<const TimeCode> times, const AugmentedCatalog& augs);

/// Inverse of embed_message(); sentences must be in sequence order.
std::vector<std::uint8_t> decode_message(std::span<const ReceivedSentence> sentences, PrivateKey key,
                                         const AugmentedCatalog& augs);

}  // namespace kwstega
