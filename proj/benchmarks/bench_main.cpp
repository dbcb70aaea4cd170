#include <benchmark/benchmark.h>

#include <random>

#include "kwstega/augment.hpp"
#include "kwstega/codec.hpp"
#include "kwstega/metrics.hpp"
#include "kwstega/mock_provider.hpp"
#include "kwstega/pipeline.hpp"

using namespace kwstega;

namespace {

const KeywordCatalog& fixture() {
  static const KeywordCatalog c = [] {
    MockProvider m;
    return build_catalog(m, PromptLibrary::builtin(), "Entertainment News");
  }();
  return c;
}

std::vector<std::uint8_t> payload_of(std::size_t n) {
  std::mt19937_64 rng(n);
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

std::vector<TimeCode> times_for(std::size_t n) {
  std::vector<TimeCode> out;
  auto t = TimeCode::parse("24-01-01 00:00:00");
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(t);
    t = add_seconds(t, 1);
  }
  return out;
}

void BM_AugmentCatalog(benchmark::State& state) {
  for (auto _ : state) {
    AugmentedCatalog augs(fixture());
    benchmark::DoNotOptimize(augs);
  }
}
BENCHMARK(BM_AugmentCatalog);

void BM_Apportion(benchmark::State& state) {
  std::vector<double> p(16);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(16 - i) / 136.0;
  for (auto _ : state) benchmark::DoNotOptimize(apportion(p, 1u << 18));
}
BENCHMARK(BM_Apportion);

void BM_EmbedDecode(benchmark::State& state) {
  const AugmentedCatalog augs(fixture());
  const auto payload = payload_of(static_cast<std::size_t>(state.range(0)));
  const auto times = times_for(group_count(payload.size()));
  const PrivateKey key{0x9e3779b97f4a7c15ull};
  for (auto _ : state) {
    auto planned = embed_message(payload, key, times, augs);
    std::vector<ReceivedSentence> rx;
    rx.reserve(planned.size());
    for (const auto& p : planned) rx.push_back({p.plan.keywords, p.stamps, p.time});
    benchmark::DoNotOptimize(decode_message(rx, key, augs));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmbedDecode)->Arg(16)->Arg(256)->Arg(4096);

void BM_MockPipelineRoundTrip(benchmark::State& state) {
  const auto payload = payload_of(static_cast<std::size_t>(state.range(0)));
  const PrivateKey key{42};
  for (auto _ : state) {
    MockProvider mock({.seed = 42});
    SessionConfig s;
    s.clock = std::make_shared<SteppingClock>(TimeCode::parse("24-01-01 00:00:00"));
    auto r = embed_pipeline(payload, key, mock, fixture(), s);
    benchmark::DoNotOptimize(extract_pipeline(r.envelopes, key, mock, fixture()));
  }
}
BENCHMARK(BM_MockPipelineRoundTrip)->Arg(32)->Arg(256);

void BM_BigramPerplexity(benchmark::State& state) {
  const NGramScorer scorer("the singer announced a new album\nthe actor praised the director\n", 2);
  const auto tokens = scorer_tokens("the director announced the new album to fans");
  for (auto _ : state) benchmark::DoNotOptimize(perplexity(scorer, tokens));
}
BENCHMARK(BM_BigramPerplexity);

}  // namespace

BENCHMARK_MAIN();
