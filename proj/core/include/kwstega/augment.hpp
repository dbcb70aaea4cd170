#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kwstega/catalog.hpp"
#include "kwstega/roles.hpp"

namespace kwstega {

/// Largest-remainder apportionment of `capacity` slots by `probabilities`.
///
/// Each entry gets floor(p * capacity) slots, raised to at least one. Leftover
/// slots go one at a time to the entries with the largest fractional
/// remainder, earlier position first on ties; entries raised to one take no
/// leftover. If the minimum-one rule oversubscribes the capacity, slots are
/// taken back one at a time from the longest block, choosing the smallest
/// probability (then the later position) among equally long blocks, which
/// keeps lengths monotone in probability.
///
/// Throws CapacityTooSmall if capacity < probabilities.size().
std::vector<std::uint32_t> apportion(std::span<const double> probabilities, std::uint32_t capacity);

struct KeywordBlock {
  std::string surface;
  std::uint32_t base;
  std::uint32_t length;

  bool operator==(const KeywordBlock&) const = default;
};

/// A keyword subset expanded to a fixed index space of contiguous blocks in
/// catalog order.
class AugmentedSubset {
 public:
  AugmentedSubset(KeywordRole role, std::uint32_t capacity, std::vector<KeywordBlock> blocks);

  KeywordRole role() const noexcept { return role_; }
  std::uint32_t capacity() const noexcept { return capacity_; }
  /// Bits needed to address every slot: ceil(log2(capacity)).
  unsigned index_width() const noexcept;
  std::span<const KeywordBlock> blocks() const noexcept { return blocks_; }

  /// Throws IndexOutOfRange unless index < capacity.
  const std::string& keyword_at(std::uint32_t index) const;
  const KeywordBlock& block_at(std::uint32_t index) const;
  /// Throws UnknownKeyword.
  const KeywordBlock& block_of(std::string_view surface) const;

  bool operator==(const AugmentedSubset& other) const {
    return role_ == other.role_ && capacity_ == other.capacity_ && blocks_ == other.blocks_;
  }

 private:
  KeywordRole role_;
  std::uint32_t capacity_;
  std::vector<KeywordBlock> blocks_;
  std::unordered_map<std::string, std::size_t> by_surface_;
};

AugmentedSubset augment(const KeywordSubset& subset, std::uint32_t capacity);

/// The four augmented subsets at their working capacities (2^18, 2^18, 2^18,
/// 2^10), recomputed identically by sender and receiver.
class AugmentedCatalog {
 public:
  explicit AugmentedCatalog(const KeywordCatalog& catalog);

  const AugmentedSubset& operator[](KeywordRole role) const { return subsets_[index_of(role)]; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  std::vector<AugmentedSubset> subsets_;
  std::string fingerprint_;
};

}  // namespace kwstega
