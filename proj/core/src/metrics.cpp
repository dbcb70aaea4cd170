#include "kwstega/metrics.hpp"

#include <cmath>
#include <set>

#include "kwstega/error.hpp"
#include "kwstega/text.hpp"

namespace kwstega {
namespace {

constexpr std::string_view kStart = "<s>";
constexpr char kSep = '\x1f';

}  // namespace

double embedding_capacity(double total_bits, std::size_t total_words) {
  if (total_words == 0) fail(ErrorCode::ZeroWords, "embedding capacity needs at least one word");
  if (!(total_bits >= 0)) fail(ErrorCode::InvalidArgument, "bit count must be non-negative");
  return total_bits / static_cast<double>(total_words);
}

UniformScorer::UniformScorer(std::size_t vocabulary_size) {
  if (vocabulary_size == 0) fail(ErrorCode::InvalidArgument, "vocabulary size must be positive");
  p_ = 1.0 / static_cast<double>(vocabulary_size);
}

double UniformScorer::probability(std::span<const std::string>, const std::string&) const { return p_; }

std::vector<std::string> scorer_tokens(std::string_view text) { return split_words(canonicalize(text)); }

NGramScorer::NGramScorer(std::string_view corpus, int order) : order_(order) {
  if (order_ < 1) fail(ErrorCode::InvalidArgument, "n-gram order must be >= 1");
  std::set<std::string, std::less<>> vocab;
  while (!corpus.empty()) {
    auto nl = corpus.find('\n');
    auto tokens = scorer_tokens(corpus.substr(0, nl));
    corpus = nl == std::string_view::npos ? std::string_view{} : corpus.substr(nl + 1);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      vocab.insert(tokens[i]);
      auto ctx = context_key(std::span<const std::string>(tokens).first(i));
      ++context_counts_[ctx];
      ++ngram_counts_[ctx + kSep + tokens[i]];
    }
  }
  if (vocab.empty()) fail(ErrorCode::EmptyText, "training corpus has no tokens");
  vocab_size_ = vocab.size() + 1;
}

std::string NGramScorer::context_key(std::span<const std::string> prefix) const {
  const std::size_t n = static_cast<std::size_t>(order_ - 1);
  std::string key;
  for (std::size_t k = 0; k < n; ++k) {
    // position of the k-th context token counted back from the end
    const std::size_t back = n - k;
    if (k > 0) key += kSep;
    key += back <= prefix.size() ? std::string_view(prefix[prefix.size() - back]) : kStart;
  }
  return key;
}

double NGramScorer::probability(std::span<const std::string> prefix, const std::string& next) const {
  const auto ctx = context_key(prefix);
  std::size_t c_ctx = 0, c_ngram = 0;
  if (auto it = context_counts_.find(ctx); it != context_counts_.end()) c_ctx = it->second;
  if (auto it = ngram_counts_.find(ctx + kSep + next); it != ngram_counts_.end()) c_ngram = it->second;
  return (static_cast<double>(c_ngram) + 1.0) / (static_cast<double>(c_ctx) + static_cast<double>(vocab_size_));
}

double perplexity(const TokenScorer& scorer, std::span<const std::string> tokens) {
  if (tokens.empty()) fail(ErrorCode::EmptyText, "perplexity of an empty text");
  double log_sum = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const double p = scorer.probability(tokens.first(i), tokens[i]);
    if (!(p > 0)) fail(ErrorCode::ZeroProbability, "token '" + tokens[i] + "' scored " + format_double(p));
    log_sum += std::log(p);
  }
  return std::exp(-log_sum / static_cast<double>(tokens.size()));
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) fail(ErrorCode::EmptyCounts, "no classified samples");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

GaussianSummary gaussian_summarize(std::span<const std::vector<double>> samples) {
  if (samples.size() < 2) fail(ErrorCode::TooFewSamples, "need at least two samples");
  const std::size_t dims = samples.front().size();
  if (dims == 0) fail(ErrorCode::DimensionMismatch, "samples have no dimensions");
  // Welford's running update.
  std::vector<double> mean(dims, 0.0), m2(dims, 0.0);
  std::size_t n = 0;
  for (const auto& row : samples) {
    if (row.size() != dims) fail(ErrorCode::DimensionMismatch, "ragged sample rows");
    ++n;
    for (std::size_t d = 0; d < dims; ++d) {
      const double delta = row[d] - mean[d];
      mean[d] += delta / static_cast<double>(n);
      m2[d] += delta * (row[d] - mean[d]);
    }
  }
  GaussianSummary out{mean, std::vector<double>(dims)};
  for (std::size_t d = 0; d < dims; ++d) {
    out.sigma[d] = std::max(std::sqrt(m2[d] / static_cast<double>(n)), kSigmaFloor);
  }
  return out;
}

double kld_gaussian(const GaussianSummary& x, const GaussianSummary& y) {
  if (x.mu.size() != y.mu.size() || x.sigma.size() != x.mu.size() || y.sigma.size() != y.mu.size()) {
    fail(ErrorCode::DimensionMismatch, "summaries differ in dimensionality");
  }
  double sum = 0;
  for (std::size_t d = 0; d < x.mu.size(); ++d) {
    if (!(x.sigma[d] > 0) || !(y.sigma[d] > 0)) fail(ErrorCode::InvalidArgument, "sigma must be positive");
    const double dm = x.mu[d] - y.mu[d];
    sum += std::log(y.sigma[d] / x.sigma[d]) +
           (x.sigma[d] * x.sigma[d] + dm * dm) / (2.0 * y.sigma[d] * y.sigma[d]) - 0.5;
  }
  return sum;
}

}  // namespace kwstega
