#include "kwstega/http_provider.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "kwstega/error.hpp"

namespace kwstega {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) fail(ErrorCode::InvalidArgument, "endpoint needs a scheme: " + std::string(url));
  auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") fail(ErrorCode::InvalidArgument, "unsupported scheme " + std::string(scheme));
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  if (path_start == scheme_end + 3) fail(ErrorCode::InvalidArgument, "endpoint has no host");
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

}  // namespace

void ProviderConfig::validate() const {
  if (!(timeout_seconds > 0)) fail(ErrorCode::InvalidArgument, "timeout must be positive");
  if (max_retries < 0) fail(ErrorCode::InvalidArgument, "retries must be >= 0");
  if (auth_env.empty()) fail(ErrorCode::InvalidArgument, "auth environment variable name is empty");
  split_url(endpoint);
  try {
    if (!nlohmann::json::parse(decoding_json).is_object()) {
      fail(ErrorCode::InvalidArgument, "decoding options must be a JSON object");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("decoding options: ") + e.what());
  }
}

std::string build_chat_request(const ProviderConfig& config, std::string_view prompt) {
  nlohmann::ordered_json body;
  body["model"] = config.model;
  body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", std::string(prompt)}}});
  auto extra = nlohmann::ordered_json::parse(config.decoding_json);
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (it.key() != "model" && it.key() != "messages") body[it.key()] = it.value();
  }
  return body.dump();
}

std::string parse_chat_response(std::string_view body) {
  try {
    auto doc = nlohmann::json::parse(body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ProviderTransport, std::string("unexpected chat response: ") + e.what());
  }
}

HttpTransport default_http_transport() {
  return [](const HttpRequest& req) {
    auto url = split_url(req.url);
    httplib::Client client(url.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(req.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(req.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!req.bearer_token.empty()) headers.emplace("Authorization", "Bearer " + req.bearer_token);
    auto res = client.Post(url.path, headers, req.body, "application/json");
    HttpResponse out;
    if (!res) {
      auto err = res.error();
      out.failure = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                        ? HttpResponse::Failure::timeout
                        : HttpResponse::Failure::connect;
      out.body = httplib::to_string(err);
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  };
}

HttpProvider::HttpProvider(ProviderConfig config, HttpTransport transport, Sleeper sleeper)
    : config_(std::move(config)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
  config_.validate();
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string HttpProvider::complete(const CompletionRequest& request) { return complete(request.prompt); }

std::string HttpProvider::complete(std::string_view prompt) {
  last_attempts_ = 0;
  const char* token = std::getenv(config_.auth_env.c_str());
  if (token == nullptr || *token == '\0') {
    fail(ErrorCode::ProviderAuth, "environment variable " + config_.auth_env + " is not set");
  }
  HttpRequest req{config_.endpoint, build_chat_request(config_, prompt), token,
                  std::chrono::milliseconds(static_cast<long long>(config_.timeout_seconds * 1000.0))};

  std::chrono::milliseconds backoff{500};
  ErrorCode last_code = ErrorCode::ProviderTransport;
  std::string last_message;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper_(backoff);
      backoff *= 2;
    }
    ++last_attempts_;
    const auto res = transport_(req);
    if (res.failure == HttpResponse::Failure::connect) {
      last_code = ErrorCode::ProviderTransport;
      last_message = "connection failed: " + res.body;
      continue;
    }
    if (res.failure == HttpResponse::Failure::timeout) {
      last_code = ErrorCode::ProviderTimeout;
      last_message = "request timed out: " + res.body;
      continue;
    }
    if (res.status == 401 || res.status == 403) {
      fail(ErrorCode::ProviderAuth, "HTTP " + std::to_string(res.status));
    }
    if (res.status == 429) {
      last_code = ErrorCode::ProviderRateLimited;
      last_message = "HTTP 429";
      continue;
    }
    if (res.status >= 500) {
      last_code = ErrorCode::ProviderTransport;
      last_message = "HTTP " + std::to_string(res.status);
      continue;
    }
    if (res.status != 200) {
      fail(ErrorCode::ProviderTransport, "HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200));
    }
    return parse_chat_response(res.body);
  }
  fail(last_code, last_message + " after " + std::to_string(last_attempts_) + " attempts");
}

}  // namespace kwstega
