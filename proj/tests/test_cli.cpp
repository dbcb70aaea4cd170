#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "kwstega/envelope.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, std::string stdin_text = {}) {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  int code = kwstega::cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void spit(const fs::path& p, std::string_view s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

// key + catalog under dir
void prepare(const fs::path& dir) {
  ASSERT_EQ(run({"keygen", "--out", (dir / "key").string()}).code, 0);
  ASSERT_EQ(run({"catalog", "build", "--mock", "--theme", "Entertainment News", "--out", (dir / "cat.json").string()})
                .code,
            0);
}

}  // namespace

TEST(Cli, NoArgumentsIsUsageError) { EXPECT_NE(run({}).code, 0); }

TEST(Cli, CatalogBuildMockIsDeterministic) {
  auto dir = kwstega::testing::scratch_dir("cli-catalog");
  auto a = run({"catalog", "build", "--mock", "--theme", "Entertainment News", "--out", (dir / "a.json").string()});
  auto b = run({"catalog", "build", "--mock", "--theme", "Entertainment News", "--out", (dir / "b.json").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  EXPECT_EQ(slurp(dir / "a.json"), kwstega::testing::fixture_catalog().serialize());
}

TEST(Cli, CatalogBuildWithoutThemeIsUsageError) {
  auto r = run({"catalog", "build", "--mock"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, MockAndEndpointExclusive) {
  auto r = run({"catalog", "build", "--mock", "--endpoint", "http://x/y", "--theme", "t"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, CatalogInspectShowsUnitSums) {
  auto dir = kwstega::testing::scratch_dir("cli-inspect");
  prepare(dir);
  auto r = run({"catalog", "inspect", "--catalog", (dir / "cat.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t count = 0;
  for (std::size_t pos = r.out.find("sum p = 1\n"); pos != std::string::npos; pos = r.out.find("sum p = 1\n", pos + 1))
    ++count;
  EXPECT_EQ(count, 4u) << r.out;
  EXPECT_NE(r.out.find(kwstega::testing::fixture_catalog().fingerprint()), std::string::npos);
  EXPECT_NE(r.out.find("capacity 262144"), std::string::npos);
}

TEST(Cli, KeygenFormatAndFreshness) {
  auto dir = kwstega::testing::scratch_dir("cli-keygen");
  std::set<std::string> seen;
  for (int i = 0; i < 10; ++i) {
    auto path = dir / ("k" + std::to_string(i));
    ASSERT_EQ(run({"keygen", "--out", path.string()}).code, 0);
    auto text = slurp(path);
    ASSERT_EQ(text.size(), 17u);
    EXPECT_EQ(text.back(), '\n');
    EXPECT_EQ(text.find_first_not_of("0123456789abcdef"), 16u);
    seen.insert(text);
  }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(Cli, KeygenUnwritablePath) {
  auto r = run({"keygen", "--out", "/nonexistent/dir/key"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("io_error"), std::string::npos);
}

TEST(Cli, EmbedExtractRoundTrip) {
  auto dir = kwstega::testing::scratch_dir("cli-roundtrip");
  prepare(dir);
  const std::string message = "binary\x01\x02\xff payload with a newline\n";
  spit(dir / "msg", message);
  auto e = run({"embed", "--mock", "--seed", "4", "--in", (dir / "msg").string(), "--key", (dir / "key").string(),
                "--catalog", (dir / "cat.json").string(), "--out", (dir / "env.jsonl").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("EC (bpw)"), std::string::npos);
  auto x = run({"extract", "--mock", "--in", (dir / "env.jsonl").string(), "--key", (dir / "key").string(),
                "--catalog", (dir / "cat.json").string(), "--out", (dir / "back").string()});
  ASSERT_EQ(x.code, 0) << x.err;
  EXPECT_EQ(slurp(dir / "back"), message);
}

TEST(Cli, EmptyStdinGivesOneEnvelope) {
  auto dir = kwstega::testing::scratch_dir("cli-empty");
  prepare(dir);
  auto e = run({"embed", "--mock", "--key", (dir / "key").string(), "--catalog", (dir / "cat.json").string()}, "");
  ASSERT_EQ(e.code, 0) << e.err;
  std::istringstream lines(e.out);
  EXPECT_EQ(kwstega::read_envelopes(lines).size(), 1u);
}

TEST(Cli, MissingKeyFile) {
  auto dir = kwstega::testing::scratch_dir("cli-nokey");
  prepare(dir);
  auto e = run({"embed", "--mock", "--key", (dir / "absent").string(), "--catalog", (dir / "cat.json").string()}, "x");
  EXPECT_NE(e.code, 0);
}

TEST(Cli, WrongKeyReportsOffsetOutOfRange) {
  auto dir = kwstega::testing::scratch_dir("cli-wrongkey");
  prepare(dir);
  auto e = run({"embed", "--mock", "--key", (dir / "key").string(), "--catalog", (dir / "cat.json").string(), "--out",
                (dir / "env.jsonl").string()},
               "attack at dawn");
  ASSERT_EQ(e.code, 0) << e.err;
  // The top hex digit reaches the high subject offset bits; every fixture
  // subject block is shorter than 2^17.
  auto key = slurp(dir / "key");
  const char* digits = "0123456789abcdef";
  key[0] = digits[(std::string_view(digits).find(key[0])) ^ 8];
  spit(dir / "bad", key);
  auto x = run({"extract", "--mock", "--in", (dir / "env.jsonl").string(), "--key", (dir / "bad").string(),
                "--catalog", (dir / "cat.json").string()});
  EXPECT_EQ(x.code, 1);
  EXPECT_NE(x.err.find("offset_out_of_range"), std::string::npos) << x.err;
}

TEST(Cli, EnvelopeSchemaError) {
  auto dir = kwstega::testing::scratch_dir("cli-schema");
  prepare(dir);
  spit(dir / "env.jsonl", "{\"version\":1,\"seq\":0}\n");
  auto x = run({"extract", "--mock", "--in", (dir / "env.jsonl").string(), "--key", (dir / "key").string(),
                "--catalog", (dir / "cat.json").string()});
  EXPECT_EQ(x.code, 1);
  EXPECT_NE(x.err.find("schema_error"), std::string::npos);
}

TEST(Cli, MetricsEc) {
  auto dir = kwstega::testing::scratch_dir("cli-ec");
  prepare(dir);
  ASSERT_EQ(run({"embed", "--mock", "--key", (dir / "key").string(), "--catalog", (dir / "cat.json").string(),
                 "--out", (dir / "env.jsonl").string()},
                "abcdefghij")
                .code,
            0);
  auto envelopes = kwstega::read_envelopes(dir / "env.jsonl");
  std::size_t words = 0;
  for (const auto& e : envelopes) {
    std::istringstream ws(e.stego_text);
    words += std::distance(std::istream_iterator<std::string>(ws), std::istream_iterator<std::string>());
  }
  auto r = run({"metrics", "ec", "--in", (dir / "env.jsonl").string(), "--payload-bytes", "10", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(doc["value"].get<double>(), 80.0 / static_cast<double>(words));
  EXPECT_EQ(doc["metric"], "ec_bpw");
}

TEST(Cli, MetricsKldSelfIsZero) {
  auto dir = kwstega::testing::scratch_dir("cli-kld");
  spit(dir / "x.txt", "# features\n1 2 3\n2 2 5\n0.5 4 1\n");
  auto r = run({"metrics", "kld", "--in", (dir / "x.txt").string(), "--ref", (dir / "x.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("kld: 0\n"), std::string::npos) << r.out;
}

TEST(Cli, MetricsPplToyCorpus) {
  auto dir = kwstega::testing::scratch_dir("cli-ppl");
  spit(dir / "t.txt", "The singer praised the new album\nfans loved the actor\n");
  auto r = run({"metrics", "ppl", "--corpus", KWSTEGA_TOY_CORPUS, "--in", (dir / "t.txt").string(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["value"].get<double>(), (7.082211812763387 + 7.095687669331029) / 2, 1e-12);
  EXPECT_EQ(doc["vocabulary"], 12);
}

TEST(Cli, MetricsAcc) {
  auto dir = kwstega::testing::scratch_dir("cli-acc");
  spit(dir / "c.txt", "tp=515 tn=516\nfp=484 fn=485\n");
  auto r = run({"metrics", "acc", "--in", (dir / "c.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("accuracy: 0.5155"), std::string::npos) << r.out;
  spit(dir / "z.txt", "tp=0 tn=0 fp=0 fn=0\n");
  auto z = run({"metrics", "acc", "--in", (dir / "z.txt").string()});
  EXPECT_EQ(z.code, 1);
  EXPECT_NE(z.err.find("empty_counts"), std::string::npos);
}

TEST(Cli, Demo) {
  auto dir = kwstega::testing::scratch_dir("cli-demo");
  auto r = run({"demo", "--seed", "42", "--dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("round trip OK"), std::string::npos);
}
