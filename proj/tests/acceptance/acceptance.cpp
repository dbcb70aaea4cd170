// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "kwstega/augment.hpp"
#include "kwstega/codec.hpp"
#include "kwstega/error.hpp"
#include "kwstega/metrics.hpp"
#include "kwstega/mock_provider.hpp"
#include "kwstega/pipeline.hpp"
#include "kwstega/text.hpp"

using namespace kwstega;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

SessionConfig session(int max_iterations = 8) {
  SessionConfig s;
  s.max_iterations = max_iterations;
  s.clock = std::make_shared<SteppingClock>(TimeCode::parse("24-01-01 00:00:00"));
  return s;
}

const KeywordCatalog& fixture() {
  static const KeywordCatalog c = [] {
    MockProvider m;
    return build_catalog(m, PromptLibrary::builtin(), "Entertainment News");
  }();
  return c;
}

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

KeywordSubset uniform(KeywordRole role, const std::string& prefix) {
  std::vector<Keyword> e;
  const auto n = expected_entry_count(role);
  for (std::size_t i = 0; i < n; ++i) e.push_back({prefix + std::to_string(i), 1.0 / static_cast<double>(n)});
  return KeywordSubset(role, e);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome ac1_round_trip() {
  std::mt19937_64 rng(20240101);
  const auto start = std::chrono::steady_clock::now();
  int ok = 0;
  for (int i = 0; i < 1000; ++i) {
    MockProvider mock({.seed = rng()});
    const auto payload = random_bytes(rng, rng() % 257);
    const PrivateKey key{rng()};
    try {
      auto r = embed_pipeline(payload, key, mock, fixture(), session());
      ok += extract_pipeline(r.envelopes, key, mock, fixture()) == payload;
    } catch (const Error&) {
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {ok == 1000 && secs < 60.0, std::to_string(ok) + "/1000 recovered in " + fmt(secs) + " s"};
}

Outcome ac2_capacity() {
  unsigned bits = 0;
  for (auto role : kKeywordRoles) bits += index_width(role);
  bool caps = role_capacity(KeywordRole::subject) == (1u << 18) && role_capacity(KeywordRole::emotion) == (1u << 10);
  int bad = 0;
  for (std::size_t b = 0; b <= 64; ++b) {
    MockProvider mock;
    auto r = embed_pipeline(std::vector<std::uint8_t>(b, 0xa5), PrivateKey{b}, mock, fixture(), session());
    const std::size_t expect = (32 + 8 * b + 63) / 64;
    if (r.envelopes.size() != expect || r.report.embedded_bits != 64 * expect) ++bad;
  }
  return {bits == 64 && caps && bad == 0,
          "bits/sentence=" + std::to_string(bits) + ", mismatched counts for b=0..64: " + std::to_string(bad)};
}

Outcome ac3_ec() {
  double worst = 0;
  for (std::size_t k = 1; k <= 200; ++k) {
    for (std::size_t w = 1; w <= 5000; w += 13) {
      const double expect = 64.0 * static_cast<double>(k) / static_cast<double>(w);
      worst = std::max(worst, std::abs(embedding_capacity(64.0 * static_cast<double>(k), w) - expect) / expect);
    }
  }
  const double at_mean = embedding_capacity(64, 1) / 13.333;
  const bool rounds = std::round(at_mean * 100) / 100 == 4.80;
  return {worst <= 1e-12 && rounds, "max rel err " + fmt(worst) + ", EC at 13.333 words = " + fmt(at_mean) +
                                        " bpw (5.93 bpw not targeted)"};
}

Outcome ac4_reject_sampling() {
  MockProvider scripted({.fail_first_attempt = true});
  std::mt19937_64 rng(4);
  auto r1 = embed_pipeline(random_bytes(rng, 200), PrivateKey{rng()}, scripted, fixture(), session());
  const bool all_two =
      std::all_of(r1.report.iterations.begin(), r1.report.iterations.end(), [](int it) { return it == 2; });

  MockProvider noisy({.seed = 30, .drop_rate = 0.3});
  auto r2 = embed_pipeline(random_bytes(rng, 4000), PrivateKey{rng()}, noisy, fixture(), session(64));
  const double n = static_cast<double>(r2.report.iterations.size());
  const double mean = r2.report.mean_iterations();
  const double p = 0.7;
  const double se = std::sqrt((1 - p) / (p * p) / n);
  const double z = (mean - 1 / p) / se;
  return {all_two && n >= 500 && std::abs(z) <= 3.0,
          "scripted: " + std::to_string(r1.report.iterations.size()) + " sentences all at iteration 2=" +
              (all_two ? "yes" : "no") + "; p=0.3 over " + fmt(n) + " sentences mean=" + fmt(mean) +
              " expected=" + fmt(1 / p) + " z=" + fmt(z)};
}

// Whether any integer lengths with |len - q| < 1, len >= 1, summing to cap exist.
bool bound_feasible(const std::vector<double>& p, std::uint32_t cap) {
  std::uint64_t lo = 0, hi = 0;
  for (double x : p) {
    const double q = x * cap;
    const double f = std::floor(q);
    lo += std::max<std::uint64_t>(1, static_cast<std::uint64_t>(f == q ? q : f));
    hi += static_cast<std::uint64_t>(std::ceil(q));
  }
  return lo <= cap && cap <= hi;
}

Outcome ac5_augmentation() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(0.01, 1.0);
  int sum_bad = 0, bound_bad = 0, mono_bad = 0, infeasible = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 16;
    const std::uint32_t cap = static_cast<std::uint32_t>(n + rng() % ((1u << 12) - n + 1));
    std::vector<double> p(n);
    for (auto& x : p) x = w(rng);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= total;
    const auto len = apportion(p, cap);
    if (std::accumulate(len.begin(), len.end(), std::uint64_t{0}) != cap) ++sum_bad;
    bool bound_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(std::abs(static_cast<double>(len[i]) - p[i] * cap) < 1.0)) bound_ok = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (p[i] > p[j] && len[i] < len[j]) ++mono_bad;
      }
    }
    if (!bound_feasible(p, cap)) ++infeasible;
    if (!bound_ok) ++bound_bad;
  }
  const AugmentedCatalog augs(fixture());
  bool full = true;
  for (auto role : kKeywordRoles) {
    std::uint64_t s = 0;
    for (const auto& b : augs[role].blocks()) s += b.length;
    full = full && s == role_capacity(role) && augs[role].capacity() == role_capacity(role);
  }
  full = full && augs[KeywordRole::subject].capacity() == (1u << 18) && augs[KeywordRole::emotion].capacity() == (1u << 10);
  return {sum_bad == 0 && bound_bad == 0 && mono_bad == 0 && full,
          "sum violations=" + std::to_string(sum_bad) + ", |len-p*cap|>=1 violations=" + std::to_string(bound_bad) +
              " (infeasible draws=" + std::to_string(infeasible) + "), monotonicity violations=" +
              std::to_string(mono_bad) + ", full-scale capacities " + (full ? "2^18/2^18/2^18/2^10" : "WRONG")};
}

Outcome ac6_cipher() {
  std::mt19937_64 rng(6);
  constexpr FieldValues widths = {18, 18, 18, 10};
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    Offsets o;
    for (std::size_t f = 0; f < 4; ++f) o.value[f] = static_cast<std::uint32_t>(rng() & ((1u << widths[f]) - 1));
    const PrivateKey key{rng()};
    TimeCode t;
    t.yy = static_cast<std::uint8_t>(rng() % 100);
    t.mm = static_cast<std::uint8_t>(1 + rng() % 12);
    t.dd = static_cast<std::uint8_t>(1 + rng() % 28);
    t.hh = static_cast<std::uint8_t>(rng() % 24);
    t.mi = static_cast<std::uint8_t>(rng() % 60);
    t.ss = static_cast<std::uint8_t>(rng() % 60);
    if (decrypt_offsets(encrypt_offsets(o, key, t), key, t) != o) ++bad;
  }
  int flip_bad = 0;
  const PrivateKey key{0x243f6a8885a308d3ull};
  const auto t = TimeCode::parse("24-01-01 00:00:00");
  const auto base = derive_mask(key, t);
  for (int bit = 0; bit < 64; ++bit) {
    const auto m = derive_mask(PrivateKey{key.value ^ (std::uint64_t{1} << bit)}, t);
    int changed = 0;
    for (std::size_t f = 0; f < 4; ++f) changed += std::popcount(m.bits[f] ^ base.bits[f]);
    if (changed != 1) ++flip_bad;
  }
  Offsets sample;
  sample.value = {0x2a2a2, 0x15555, 7, 0x3ff};
  const bool identity = apply_mask(sample, derive_mask(PrivateKey{0}, std::uint64_t{0})).stamp == sample.value &&
                        derive_mask(PrivateKey{0}, std::uint64_t{0}) == Mask{};
  return {bad == 0 && flip_bad == 0 && identity, "round-trip failures " + std::to_string(bad) +
                                                     "/10000, key bit flips not touching exactly one mask bit " +
                                                     std::to_string(flip_bad) + "/64, zero key/time identity " +
                                                     (identity ? "yes" : "no")};
}

Outcome ac7_tamper() {
  std::mt19937_64 rng(7);
  int offset_err = 0, other_err = 0, differs = 0, silent = 0;
  for (int i = 0; i < 200; ++i) {
    MockProvider mock({.seed = rng()});
    const auto payload = random_bytes(rng, 1 + rng() % 64);
    const PrivateKey key{rng()};
    PrivateKey wrong{rng()};
    if (wrong == key) wrong.value ^= 1;
    auto r = embed_pipeline(payload, key, mock, fixture(), session());
    try {
      if (extract_pipeline(r.envelopes, wrong, mock, fixture()) == payload) {
        ++silent;
      } else {
        ++differs;
      }
    } catch (const Error& e) {
      (e.code() == ErrorCode::OffsetOutOfRange ? offset_err : other_err)++;
    }
  }

  // One-sentence message whose emotion keyword owns a block of length 1.
  KeywordSubset emotion(KeywordRole::emotion, {{"calm", 0.999}, {"rare", 0.0005}, {"scarce", 0.0005}});
  const KeywordCatalog skewed("Test", {uniform(KeywordRole::subject, "s"), uniform(KeywordRole::predicate, "p"),
                                       uniform(KeywordRole::object, "o"), emotion});
  const AugmentedCatalog augs(skewed);
  const std::vector<std::uint8_t> payload = {'o', 'k', 0x03, 0xfe};
  const auto plan = plan_sentence(split_chunks(frame(payload).bitstream).front(), augs);
  const bool unit_block = augs[KeywordRole::emotion].block_of(plan.keywords[KeywordRole::emotion]).length == 1;
  MockProvider mock;
  const PrivateKey key{0x0123456789abcdefull};
  auto r = embed_pipeline(payload, key, mock, skewed, session());
  int flip_silent = 0, flips = 0, unit_caught = 0;
  constexpr FieldValues widths = {18, 18, 18, 10};
  for (std::size_t f = 0; f < 4; ++f) {
    for (unsigned bit = 0; bit < widths[f]; ++bit) {
      auto env = r.envelopes;
      env[0].stamps.stamp[f] ^= 1u << bit;
      ++flips;
      try {
        if (extract_pipeline(env, key, mock, skewed) == payload) ++flip_silent;
      } catch (const Error& e) {
        if (f == 3 && e.code() == ErrorCode::OffsetOutOfRange) ++unit_caught;
      }
    }
  }
  return {silent == 0 && flip_silent == 0 && unit_block && unit_caught == 10 && r.envelopes.size() == 1,
          "wrong key x200: offset_out_of_range=" + std::to_string(offset_err) + ", other decode error=" +
              std::to_string(other_err) + ", different payload=" + std::to_string(differs) +
              ", silent correct=" + std::to_string(silent) + "; stamp bit flips: " + std::to_string(flips) +
              " tried, silent correct=" + std::to_string(flip_silent) + ", unit-block flips rejected " +
              std::to_string(unit_caught) + "/10"};
}

class Quarter final : public TokenScorer {
 public:
  double probability(std::span<const std::string>, const std::string&) const override { return 0.25; }
};

Outcome ac8_metrics() {
  const std::vector<std::string> two = {"a", "b"};
  const double ppl = perplexity(Quarter{}, two);
  const double acc = accuracy({.tp = 515, .tn = 516, .fp = 484, .fn = 485});
  const GaussianSummary x{{0.0, 2.5}, {1.0, 0.3}};
  const double self = kld_gaussian(x, x);
  const double hand = kld_gaussian({{0.0}, {1.0}}, {{1.0}, {1.0}});
  return {ppl == 4.0 && std::abs(acc - 0.5155) < 1e-12 && self == 0.0 && hand == 0.5,
          "ppl=" + fmt(ppl) + " acc=" + fmt(acc) + " kld(x,x)=" + fmt(self) + " kld((0,1),(1,1))=" + fmt(hand)};
}

// SHA-256 of the envelope file produced below, recorded when the format was
// frozen. A different digest on another platform means output drifted.
constexpr std::string_view kGoldenEnvelopeDigest =
    "8e263f091424b2b50c4c6ee0cf3684472188964ffbbbf88e8c44139d46d0b42c";

Outcome ac9_determinism() {
  const auto dir = fs::temp_directory_path() / "kwstega-acceptance-ac9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto write = [](const fs::path& p, std::string_view s) {
    std::ofstream f(p, std::ios::binary);
    f << s;
  };
  auto read = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  write(dir / "key", "0123456789abcdef\n");
  write(dir / "msg", "Meet me by the old bridge at seven.");
  std::ostringstream sink;
  std::istringstream none;
  int rc = cli::run({"catalog", "build", "--mock", "--theme", "Entertainment News", "--out", (dir / "cat.json").string()},
                    none, sink, sink);
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    rc |= cli::run({"embed", "--mock", "--seed", "42", "--in", (dir / "msg").string(), "--key", (dir / "key").string(),
                    "--catalog", (dir / "cat.json").string(), "--out", (dir / name).string()},
                   none, sink, sink);
  }
  const auto a = read(dir / "a.jsonl");
  const auto b = read(dir / "b.jsonl");
  const auto digest = sha256_hex(a);
  const bool golden = kGoldenEnvelopeDigest.empty() || digest == kGoldenEnvelopeDigest;
  return {rc == 0 && !a.empty() && a == b && golden,
          std::string("two runs ") + (a == b ? "byte-identical" : "DIFFER") + ", sha256 " + digest +
              (kGoldenEnvelopeDigest.empty() ? " (no golden digest)" : golden ? " matches golden" : " != golden")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC-1 round-trip correctness", ac1_round_trip},
      {"AC-2 capacity arithmetic", ac2_capacity},
      {"AC-3 embedding capacity formula", ac3_ec},
      {"AC-4 reject-sampling behaviour", ac4_reject_sampling},
      {"AC-5 augmentation properties", ac5_augmentation},
      {"AC-6 cipher properties", ac6_cipher},
      {"AC-7 tamper and wrong-key detection", ac7_tamper},
      {"AC-8 metric spot checks", ac8_metrics},
      {"AC-9 determinism", ac9_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed;
}
