#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

#include "kwstega/provider.hpp"

namespace kwstega {

struct ProviderConfig {
  /// Full URL of a chat-completions endpoint, e.g.
  /// "https://api.openai.com/v1/chat/completions".
  std::string endpoint;
  std::string model;
  /// Name of the environment variable holding the bearer token.
  std::string auth_env = "OPENAI_API_KEY";
  double timeout_seconds = 60.0;
  int max_retries = 2;
  /// JSON object merged verbatim into the request body (temperature, top_p,
  /// ...). Must parse as an object.
  std::string decoding_json = "{}";

  /// Throws InvalidArgument unless timeout > 0, retries >= 0 and the endpoint
  /// and decoding options parse.
  void validate() const;
};

struct HttpRequest {
  std::string url;
  std::string body;
  std::string bearer_token;
  std::chrono::milliseconds timeout;
};

struct HttpResponse {
  enum class Failure { none, connect, timeout };
  Failure failure = Failure::none;
  int status = 0;
  std::string body;
};

using HttpTransport = std::function<HttpResponse(const HttpRequest&)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Request body: {"model": ..., "messages": [{"role": "user", "content": ...}], <decoding>}.
std::string build_chat_request(const ProviderConfig& config, std::string_view prompt);

/// choices[0].message.content; throws ProviderTransport on any other shape.
std::string parse_chat_response(std::string_view body);

/// cpp-httplib transport (http and https).
HttpTransport default_http_transport();

/// Chat-completion client. Transient failures (connection errors, timeouts,
/// 429, 5xx) are retried up to max_retries times with exponential backoff
/// starting at 500 ms; 401/403 fail immediately.
class HttpProvider final : public LlmProvider {
 public:
  explicit HttpProvider(ProviderConfig config, HttpTransport transport = default_http_transport(),
                        Sleeper sleeper = {});

  std::string complete(const CompletionRequest& request) override;
  std::string complete(std::string_view prompt);

  /// Attempts made by the most recent call.
  int last_attempts() const noexcept { return last_attempts_; }

 private:
  ProviderConfig config_;
  HttpTransport transport_;
  Sleeper sleeper_;
  int last_attempts_ = 0;
};

}  // namespace kwstega
