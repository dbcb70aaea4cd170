#include "cli.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kwstega/augment.hpp"
#include "kwstega/catalog.hpp"
#include "kwstega/envelope.hpp"
#include "kwstega/error.hpp"
#include "kwstega/http_provider.hpp"
#include "kwstega/metrics.hpp"
#include "kwstega/mock_provider.hpp"
#include "kwstega/pipeline.hpp"
#include "kwstega/text.hpp"

namespace kwstega::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kMockEpoch = "24-01-01 00:00:00";

struct Options {
  // provider
  bool mock = false;
  std::uint64_t seed = 0;
  double drop_rate = 0.0;
  std::string endpoint;
  std::string model;
  std::string auth_env = "OPENAI_API_KEY";
  double timeout = 60.0;
  int retries = 2;
  std::string transcripts;
  // session
  std::string theme;
  int max_iters = 8;
  int max_len = 30;
  std::string start_time;
  // paths
  std::string catalog;
  std::string key;
  std::string in;
  std::string out;
  std::string ref;
  std::string corpus;
  std::string report;
  std::string dir;
  // misc
  bool optimize = false;
  int order = 2;
  std::optional<std::uint64_t> payload_bytes;
  std::string format = "text";
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_all(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IoError, "cannot read " + path);
  return read_all(f);
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::IoError, "cannot write " + path);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  f.flush();
  if (!f) fail(ErrorCode::IoError, "write failed for " + path);
}

PrivateKey read_key(const std::string& path) {
  if (path.empty()) throw UsageError("--key is required");
  auto text = read_file(path);
  try {
    return PrivateKey::from_hex(text);
  } catch (const Error&) {
    fail(ErrorCode::InvalidArgument, "key file " + path + " must hold 16 hex digits");
  }
}

KeywordCatalog read_catalog(const std::string& path) {
  if (path.empty()) throw UsageError("--catalog is required");
  return load_catalog(path);
}

void add_provider_options(CLI::App* sub, Options& o) {
  auto* mock = sub->add_flag("--mock", o.mock, "Use the deterministic offline provider");
  sub->add_option("--seed", o.seed, "Mock provider seed");
  sub->add_option("--drop-rate", o.drop_rate, "Mock probability of dropping a keyword per generation")
      ->check(CLI::Range(0.0, 1.0));
  auto* endpoint = sub->add_option("--endpoint", o.endpoint, "Chat-completions URL of a live provider");
  sub->add_option("--model", o.model, "Model identifier for the live provider");
  sub->add_option("--auth-env", o.auth_env, "Environment variable holding the API token");
  sub->add_option("--timeout", o.timeout, "Request timeout in seconds");
  sub->add_option("--retries", o.retries, "Transport retries");
  sub->add_option("--transcripts", o.transcripts, "Directory to log prompts and replies");
  mock->excludes(endpoint);
}

struct ProviderHandle {
  std::unique_ptr<LlmProvider> base;
  std::unique_ptr<TranscriptProvider> logged;
  LlmProvider& get() { return logged ? static_cast<LlmProvider&>(*logged) : *base; }
};

ProviderHandle make_provider(const Options& o) {
  ProviderHandle h;
  if (o.mock) {
    h.base = std::make_unique<MockProvider>(MockOptions{o.seed, o.drop_rate, false});
  } else {
    if (o.endpoint.empty() || o.model.empty()) {
      throw UsageError("choose --mock or a live provider with --endpoint and --model");
    }
    ProviderConfig cfg;
    cfg.endpoint = o.endpoint;
    cfg.model = o.model;
    cfg.auth_env = o.auth_env;
    cfg.timeout_seconds = o.timeout;
    cfg.max_retries = o.retries;
    h.base = std::make_unique<HttpProvider>(cfg);
  }
  if (!o.transcripts.empty()) h.logged = std::make_unique<TranscriptProvider>(*h.base, o.transcripts);
  return h;
}

std::shared_ptr<Clock> make_clock(const Options& o) {
  if (!o.start_time.empty()) return std::make_shared<SteppingClock>(TimeCode::parse(o.start_time));
  if (o.mock) return std::make_shared<SteppingClock>(TimeCode::parse(kMockEpoch));
  return std::make_shared<SystemClock>();
}

std::string generate_key_hex() {
  std::array<unsigned char, 8> bytes{};
  if (RAND_bytes(bytes.data(), static_cast<int>(bytes.size())) != 1) {
    fail(ErrorCode::IoError, "secure random source unavailable");
  }
  std::uint64_t v = 0;
  for (auto b : bytes) v = (v << 8) | b;
  return PrivateKey{v}.to_hex();
}

std::vector<std::vector<double>> read_matrix(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto words = split_words(line);
    if (words.empty() || words.front().starts_with('#')) continue;
    std::vector<double> row;
    for (const auto& w : words) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(w, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != w.size()) fail(ErrorCode::InvalidArgument, "not a number in " + path + ": '" + w + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ConfusionCounts read_counts(const std::string& path) {
  ConfusionCounts c;
  std::array<bool, 4> seen{};
  for (const auto& tok : split_words(read_file(path))) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) fail(ErrorCode::InvalidArgument, "expected name=value, got '" + tok + "'");
    auto name = canonicalize(tok.substr(0, eq));
    std::uint64_t value = 0;
    try {
      std::size_t used = 0;
      auto s = tok.substr(eq + 1);
      if (s.empty() || s.front() == '-') throw std::invalid_argument("negative");
      value = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "bad count in '" + tok + "'");
    }
    static constexpr std::array<std::string_view, 4> names = {"tp", "tn", "fp", "fn"};
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) fail(ErrorCode::InvalidArgument, "unknown count '" + name + "'");
    auto idx = static_cast<std::size_t>(it - names.begin());
    if (seen[idx]) fail(ErrorCode::InvalidArgument, "duplicate count '" + name + "'");
    seen[idx] = true;
    (idx == 0 ? c.tp : idx == 1 ? c.tn : idx == 2 ? c.fp : c.fn) = value;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    fail(ErrorCode::InvalidArgument, "counts file needs tp, tn, fp and fn");
  }
  return c;
}

void emit_metric(std::ostream& out, const Options& o, std::string_view name, double value,
                 const nlohmann::ordered_json& extra = nlohmann::ordered_json::object()) {
  if (o.format == "json") {
    nlohmann::ordered_json rec;
    rec["metric"] = name;
    rec["value"] = value;
    for (auto it = extra.begin(); it != extra.end(); ++it) rec[it.key()] = it.value();
    out << rec.dump() << '\n';
  } else {
    for (auto it = extra.begin(); it != extra.end(); ++it) out << it.key() << ": " << it.value().dump() << '\n';
    out << name << ": " << format_double(value) << '\n';
  }
}

// --- subcommands -----------------------------------------------------------

int cmd_catalog_build(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.theme.empty()) throw UsageError("catalog build requires --theme");
  auto provider = make_provider(o);
  auto prompts = PromptLibrary::builtin();
  auto catalog = build_catalog(provider.get(), prompts, o.theme);
  if (o.optimize) catalog = optimize_probabilities(provider.get(), prompts, catalog);
  if (o.out.empty()) {
    out << catalog.serialize();
  } else {
    save_catalog(catalog, o.out);
    err << "wrote catalog " << o.out << " (fingerprint " << catalog.fingerprint() << ")\n";
  }
  return 0;
}

int cmd_catalog_inspect(const Options& o, std::ostream& out) {
  auto catalog = read_catalog(o.catalog.empty() ? o.in : o.catalog);
  const AugmentedCatalog augs(catalog);
  out << "theme: " << catalog.theme() << '\n'
      << "version: " << catalog.version() << '\n'
      << "fingerprint: " << catalog.fingerprint() << '\n';
  for (auto role : kKeywordRoles) {
    const auto& subset = catalog.subset(role);
    const auto& aug = augs[role];
    double sum = 0;
    out << '\n' << to_string(role) << " (capacity " << aug.capacity() << ", " << aug.index_width() << " bits)\n";
    for (std::size_t i = 0; i < subset.size(); ++i) {
      const auto& k = subset.entries()[i];
      const auto& b = aug.blocks()[i];
      sum += k.probability;
      out << "  " << k.surface << "  p=" << format_double(k.probability) << "  block=[" << b.base << ", "
          << b.base + b.length << ")  length=" << b.length << '\n';
    }
    out << "  sum p = " << format_double(sum) << '\n';
  }
  return 0;
}

int cmd_keygen(const Options& o, std::ostream& out, std::ostream& err) {
  auto line = generate_key_hex() + "\n";
  if (o.out.empty()) {
    out << line;
  } else {
    write_file(o.out, line);
    err << "wrote key " << o.out << '\n';
  }
  return 0;
}

int cmd_embed(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  auto key = read_key(o.key);
  auto catalog = read_catalog(o.catalog);
  std::string message = (o.in.empty() || o.in == "-") ? read_all(in) : read_file(o.in);
  auto provider = make_provider(o);
  SessionConfig session;
  session.max_iterations = o.max_iters;
  session.max_len = o.max_len;
  session.theme = o.theme;
  session.clock = make_clock(o);
  std::vector<std::uint8_t> payload(message.begin(), message.end());
  auto result = embed_pipeline(payload, key, provider.get(), catalog, session);

  std::ostream* report_stream = &err;
  if (o.out.empty() || o.out == "-") {
    write_envelopes(result.envelopes, out);
  } else {
    write_envelopes(result.envelopes, fs::path(o.out));
    report_stream = &out;
  }
  *report_stream << result.report.summary();
  if (!o.report.empty()) write_file(o.report, result.report.to_json() + "\n");
  return 0;
}

int cmd_extract(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  auto key = read_key(o.key);
  auto catalog = read_catalog(o.catalog);
  std::vector<Envelope> envelopes;
  if (o.in.empty() || o.in == "-") {
    envelopes = read_envelopes(in);
  } else {
    envelopes = read_envelopes(fs::path(o.in));
  }
  auto provider = make_provider(o);
  auto payload = extract_pipeline(envelopes, key, provider.get(), catalog);
  std::string_view bytes(reinterpret_cast<const char*>(payload.data()), payload.size());
  if (o.out.empty() || o.out == "-") {
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  } else {
    write_file(o.out, bytes);
    err << "recovered " << payload.size() << " bytes from " << envelopes.size() << " envelopes\n";
  }
  return 0;
}

int cmd_metrics_ec(const Options& o, std::ostream& out) {
  if (o.in.empty()) throw UsageError("metrics ec requires --in <envelopes>");
  auto envelopes = read_envelopes(fs::path(o.in));
  std::size_t words = 0;
  for (const auto& e : envelopes) words += count_words(e.stego_text);
  const double bits = o.payload_bytes ? 8.0 * static_cast<double>(*o.payload_bytes)
                                      : static_cast<double>(envelopes.size() * kGroupBits);
  nlohmann::ordered_json extra;
  extra["sentences"] = envelopes.size();
  extra["bits"] = bits;
  extra["words"] = words;
  emit_metric(out, o, "ec_bpw", embedding_capacity(bits, words), extra);
  return 0;
}

int cmd_metrics_ppl(const Options& o, std::ostream& out) {
  if (o.corpus.empty() || o.in.empty()) throw UsageError("metrics ppl requires --corpus and --in");
  NGramScorer scorer(read_file(o.corpus), o.order);
  std::istringstream text(read_file(o.in));
  std::string line;
  double sum = 0;
  std::size_t n = 0;
  while (std::getline(text, line)) {
    auto tokens = scorer_tokens(line);
    if (tokens.empty()) continue;
    sum += perplexity(scorer, tokens);
    ++n;
  }
  if (n == 0) fail(ErrorCode::EmptyText, o.in + " has no tokens");
  nlohmann::ordered_json extra;
  extra["texts"] = n;
  extra["order"] = o.order;
  extra["vocabulary"] = scorer.vocabulary_size();
  emit_metric(out, o, "ppl_mean", sum / static_cast<double>(n), extra);
  return 0;
}

int cmd_metrics_kld(const Options& o, std::ostream& out) {
  if (o.in.empty() || o.ref.empty()) throw UsageError("metrics kld requires --in <cover samples> and --ref <stego samples>");
  auto x = read_matrix(o.in);
  auto y = read_matrix(o.ref);
  auto sx = gaussian_summarize(x);
  auto sy = gaussian_summarize(y);
  nlohmann::ordered_json extra;
  extra["dimensions"] = sx.mu.size();
  emit_metric(out, o, "kld", kld_gaussian(sx, sy), extra);
  return 0;
}

int cmd_metrics_acc(const Options& o, std::ostream& out) {
  if (o.in.empty()) throw UsageError("metrics acc requires --in <counts file>");
  auto c = read_counts(o.in);
  nlohmann::ordered_json extra;
  extra["total"] = c.total();
  emit_metric(out, o, "accuracy", accuracy(c), extra);
  return 0;
}

int cmd_demo(Options o, std::ostream& out) {
  fs::path dir = o.dir.empty() ? fs::temp_directory_path() / ("kwstega-demo-" + std::to_string(o.seed)) : fs::path(o.dir);
  fs::create_directories(dir);
  o.mock = true;
  MockProvider provider({o.seed, o.drop_rate, false});
  auto prompts = PromptLibrary::builtin();

  const auto key_path = dir / "key.hex";
  write_file(key_path.string(), generate_key_hex() + "\n");
  auto key = PrivateKey::from_hex(read_file(key_path.string()));
  out << "[1/4] key        -> " << key_path.string() << '\n';

  const auto catalog_path = dir / "catalog.json";
  save_catalog(build_catalog(provider, prompts, o.theme.empty() ? "Entertainment News" : o.theme), catalog_path);
  auto catalog = load_catalog(catalog_path);
  out << "[2/4] catalog    -> " << catalog_path.string() << " (" << catalog.fingerprint().substr(0, 16) << "...)\n";

  const std::string message = "Meet at the north gate at nine.";
  SessionConfig session;
  session.max_iterations = o.max_iters;
  session.clock = std::make_shared<SteppingClock>(TimeCode::parse(kMockEpoch));
  auto result = embed_pipeline(std::vector<std::uint8_t>(message.begin(), message.end()), key, provider, catalog,
                               session);
  const auto env_path = dir / "envelopes.jsonl";
  write_envelopes(result.envelopes, env_path);
  out << "[3/4] embed      -> " << env_path.string() << " (" << result.envelopes.size() << " sentences)\n";
  for (const auto& e : result.envelopes) out << "      " << e.stego_text << '\n';

  MockProvider receiver({o.seed, 0.0, false});
  auto recovered = extract_pipeline(read_envelopes(env_path), key, receiver, catalog);
  std::string text(recovered.begin(), recovered.end());
  out << "[4/4] extract    -> \"" << text << "\"\n";
  out << result.report.summary();
  if (text != message) fail(ErrorCode::ExtractionFailed, "demo round trip mismatch");
  out << "round trip OK\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Keyword-choice text steganography over black-box language models", "kwstega"};
  app.require_subcommand(1);

  auto* catalog = app.add_subcommand("catalog", "Build or inspect a keyword catalog");
  catalog->require_subcommand(1);
  auto* build = catalog->add_subcommand("build", "Ask the provider for four keyword subsets");
  build->add_option("--theme", o.theme, "Theme of the generated sentences");
  build->add_option("--out", o.out, "Catalog file to write (default stdout)");
  build->add_flag("--optimize", o.optimize, "Rescore probabilities with the evaluation prompt");
  add_provider_options(build, o);
  auto* inspect = catalog->add_subcommand("inspect", "Print subsets, probabilities, blocks and fingerprint");
  inspect->add_option("--catalog", o.catalog, "Catalog file");
  inspect->add_option("--in", o.in, "Catalog file (alias)");

  auto* keygen = app.add_subcommand("keygen", "Write a random 64-bit key as 16 hex digits");
  keygen->add_option("--out", o.out, "Key file (default stdout)");

  auto* embed = app.add_subcommand("embed", "Hide a message in generated sentences");
  embed->add_option("--in", o.in, "Message file (default stdin)");
  embed->add_option("--key", o.key, "Key file");
  embed->add_option("--catalog", o.catalog, "Catalog file");
  embed->add_option("--out", o.out, "Envelope file (default stdout)");
  embed->add_option("--theme", o.theme, "Override the catalog theme");
  embed->add_option("--max-iters", o.max_iters, "Generations allowed per sentence")->check(CLI::PositiveNumber);
  embed->add_option("--max-len", o.max_len, "Sentence length hint in words")->check(CLI::PositiveNumber);
  embed->add_option("--start-time", o.start_time, "Fixed first release time YY-MM-DD HH:MM:SS, +1 s per sentence");
  embed->add_option("--report", o.report, "Write the run report as JSON");
  add_provider_options(embed, o);

  auto* extract = app.add_subcommand("extract", "Recover a message from envelopes");
  extract->add_option("--in", o.in, "Envelope file (default stdin)");
  extract->add_option("--key", o.key, "Key file");
  extract->add_option("--catalog", o.catalog, "Catalog file");
  extract->add_option("--out", o.out, "Payload file (default stdout)");
  add_provider_options(extract, o);

  auto* metrics = app.add_subcommand("metrics", "Embedding capacity, perplexity, KLD and accuracy");
  metrics->require_subcommand(1);
  auto* ec = metrics->add_subcommand("ec", "Bits per word of an envelope file");
  ec->add_option("--in", o.in, "Envelope file");
  ec->add_option("--payload-bytes", o.payload_bytes, "Count only this many payload bytes as N");
  auto* ppl = metrics->add_subcommand("ppl", "Mean per-line perplexity under an add-one n-gram model");
  ppl->add_option("--in", o.in, "Text file, one text per line");
  ppl->add_option("--corpus", o.corpus, "Training corpus, one sentence per line");
  ppl->add_option("--order", o.order, "n-gram order")->check(CLI::PositiveNumber);
  auto* kld = metrics->add_subcommand("kld", "Gaussian KLD between two sample matrices");
  kld->add_option("--in", o.in, "Cover samples, one row per line");
  kld->add_option("--ref", o.ref, "Stego samples, one row per line");
  auto* acc = metrics->add_subcommand("acc", "Steganalysis accuracy from tp=.. tn=.. fp=.. fn=..");
  acc->add_option("--in", o.in, "Counts file");
  for (auto* m : {ec, ppl, kld, acc}) {
    m->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  }

  auto* demo = app.add_subcommand("demo", "keygen, catalog build, embed and extract with the mock provider");
  demo->add_option("--seed", o.seed, "Mock seed");
  demo->add_option("--drop-rate", o.drop_rate, "Mock drop rate")->check(CLI::Range(0.0, 1.0));
  demo->add_option("--max-iters", o.max_iters, "Generations allowed per sentence")->check(CLI::PositiveNumber);
  demo->add_option("--theme", o.theme, "Catalog theme");
  demo->add_option("--dir", o.dir, "Working directory for the demo files");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) return cmd_catalog_build(o, out, err);
    if (inspect->parsed()) return cmd_catalog_inspect(o, out);
    if (keygen->parsed()) return cmd_keygen(o, out, err);
    if (embed->parsed()) return cmd_embed(o, in, out, err);
    if (extract->parsed()) return cmd_extract(o, in, out, err);
    if (ec->parsed()) return cmd_metrics_ec(o, out);
    if (ppl->parsed()) return cmd_metrics_ppl(o, out);
    if (kld->parsed()) return cmd_metrics_kld(o, out);
    if (acc->parsed()) return cmd_metrics_acc(o, out);
    if (demo->parsed()) return cmd_demo(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "usage error: no command\n";
  return 2;
}

}  // namespace kwstega::cli
