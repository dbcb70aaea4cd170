#include "kwstega/augment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "kwstega/error.hpp"

namespace kwstega {

std::vector<std::uint32_t> apportion(std::span<const double> probabilities, std::uint32_t capacity) {
  const std::size_t n = probabilities.size();
  if (n == 0) fail(ErrorCode::InvalidArgument, "nothing to apportion");
  if (capacity < n) {
    fail(ErrorCode::CapacityTooSmall, "capacity " + std::to_string(capacity) + " < " + std::to_string(n) +
                                          " entries");
  }

  std::vector<std::uint32_t> lengths(n);
  std::vector<double> remainder(n);
  std::vector<bool> raised(n, false);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double quota = probabilities[i] * static_cast<double>(capacity);
    const double whole = std::floor(quota);
    remainder[i] = quota - whole;
    auto len = static_cast<std::uint32_t>(std::min(whole, static_cast<double>(capacity)));
    if (len == 0) {
      len = 1;
      raised[i] = true;
    }
    lengths[i] = len;
    assigned += len;
  }

  if (assigned <= capacity) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
      if (!raised[i]) order.push_back(i);
    }
    if (order.empty()) {
      order.resize(n);
      std::iota(order.begin(), order.end(), 0);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    // Leftover is below order.size() when probabilities sum to one; the wrap
    // only matters for inputs that do not.
    std::uint64_t leftover = capacity - assigned;
    for (std::uint64_t k = 0; k < leftover; ++k) ++lengths[order[k % order.size()]];
  } else {
    std::uint64_t excess = assigned - capacity;
    while (excess > 0) {
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (lengths[i] <= 1) continue;
        if (pick == n || lengths[i] > lengths[pick] ||
            (lengths[i] == lengths[pick] && probabilities[i] <= probabilities[pick])) {
          pick = i;
        }
      }
      --lengths[pick];
      --excess;
    }
  }
  return lengths;
}

AugmentedSubset::AugmentedSubset(KeywordRole role, std::uint32_t capacity, std::vector<KeywordBlock> blocks)
    : role_(role), capacity_(capacity), blocks_(std::move(blocks)) {
  std::uint64_t next = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    if (b.base != next || b.length == 0) fail(ErrorCode::InvalidArgument, "blocks must be contiguous and nonempty");
    next += b.length;
    if (!by_surface_.emplace(b.surface, i).second) fail(ErrorCode::InvalidArgument, "duplicate block surface");
  }
  if (next != capacity_) fail(ErrorCode::InvalidArgument, "blocks do not cover the capacity");
}

unsigned AugmentedSubset::index_width() const noexcept {
  return capacity_ <= 1 ? 0u : static_cast<unsigned>(std::bit_width(capacity_ - 1));
}

const KeywordBlock& AugmentedSubset::block_at(std::uint32_t index) const {
  if (index >= capacity_) {
    fail(ErrorCode::IndexOutOfRange, "index " + std::to_string(index) + " >= capacity " + std::to_string(capacity_));
  }
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), index,
                             [](std::uint32_t value, const KeywordBlock& b) { return value < b.base; });
  return *std::prev(it);
}

const std::string& AugmentedSubset::keyword_at(std::uint32_t index) const { return block_at(index).surface; }

const KeywordBlock& AugmentedSubset::block_of(std::string_view surface) const {
  auto it = by_surface_.find(std::string(surface));
  if (it == by_surface_.end()) {
    fail(ErrorCode::UnknownKeyword, "'" + std::string(surface) + "' is not a " + std::string(to_string(role_)) +
                                        " keyword");
  }
  return blocks_[it->second];
}

AugmentedSubset augment(const KeywordSubset& subset, std::uint32_t capacity) {
  auto probs = subset.probabilities();
  auto lengths = apportion(probs, capacity);
  std::vector<KeywordBlock> blocks;
  std::uint32_t base = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    blocks.push_back({subset.entries()[i].surface, base, lengths[i]});
    base += lengths[i];
  }
  return AugmentedSubset(subset.role(), capacity, std::move(blocks));
}

AugmentedCatalog::AugmentedCatalog(const KeywordCatalog& catalog) : fingerprint_(catalog.fingerprint()) {
  subsets_.reserve(4);
  for (auto role : kKeywordRoles) subsets_.push_back(augment(catalog.subset(role), role_capacity(role)));
}

}  // namespace kwstega
