#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kwstega {

/// Payload bits per word, N / W. Throws ZeroWords if W == 0.
double embedding_capacity(double total_bits, std::size_t total_words);

/// Probability of the next token given every token before it.
class TokenScorer {
 public:
  virtual ~TokenScorer() = default;
  /// Must return a value in (0, 1] for a usable scorer; perplexity() rejects 0.
  virtual double probability(std::span<const std::string> prefix, const std::string& next) const = 0;
};

/// Every token has probability 1/V.
class UniformScorer final : public TokenScorer {
 public:
  explicit UniformScorer(std::size_t vocabulary_size);
  double probability(std::span<const std::string> prefix, const std::string& next) const override;

 private:
  double p_;
};

/// Add-one smoothed n-gram model.
///
/// Training text is split into lines; each line is lowercased, split on
/// whitespace, and left-padded with (order - 1) "<s>" markers. For a context c
/// (the previous order-1 tokens, "<s>"-padded) and token w:
///
///   p(w | c) = (count(c, w) + 1) / (count(c) + V)
///
/// where V is the number of distinct training tokens plus one slot for unseen
/// tokens.
class NGramScorer final : public TokenScorer {
 public:
  NGramScorer(std::string_view corpus, int order = 2);

  double probability(std::span<const std::string> prefix, const std::string& next) const override;

  int order() const noexcept { return order_; }
  std::size_t vocabulary_size() const noexcept { return vocab_size_; }

 private:
  std::string context_key(std::span<const std::string> prefix) const;

  int order_;
  std::size_t vocab_size_;
  std::map<std::string, std::size_t, std::less<>> context_counts_;
  std::map<std::string, std::size_t, std::less<>> ngram_counts_;
};

/// Tokens as the n-gram scorer sees them: lowercase, whitespace split.
std::vector<std::string> scorer_tokens(std::string_view text);

/// exp(-(1/N) * sum log p(w_i | w_1..w_{i-1})). EmptyText if N == 0,
/// ZeroProbability if any scored probability is not positive.
double perplexity(const TokenScorer& scorer, std::span<const std::string> tokens);

struct ConfusionCounts {
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
};

/// (TP + TN) / total; EmptyCounts if total == 0.
double accuracy(const ConfusionCounts& counts);

inline constexpr double kSigmaFloor = 1e-12;

struct GaussianSummary {
  std::vector<double> mu;
  std::vector<double> sigma;
};

/// Per-dimension population mean and standard deviation of `samples` (one row
/// per sample). Sigma is floored at 1e-12. TooFewSamples below two rows,
/// DimensionMismatch on ragged rows.
GaussianSummary gaussian_summarize(std::span<const std::vector<double>> samples);

/// Sum over dimensions of
///   log(sigma_y / sigma_x) + (sigma_x^2 + (mu_x - mu_y)^2) / (2 sigma_y^2) - 1/2.
double kld_gaussian(const GaussianSummary& x, const GaussianSummary& y);

}  // namespace kwstega
