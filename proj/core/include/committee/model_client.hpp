// Uniform access to chat-completion backends.
//
// Http endpoints speak the OpenAI-compatible protocol:
//   POST {base_url}/chat/completions
//   {"model": ..., "messages": [{"role", "content"}...], "temperature": ...}
// and read choices[0].message.content from the reply. Every request also
// carries X-Committee-Query-Id and X-Committee-Attempt headers, which real
// servers ignore and the mock committee server uses to pick scripted replies.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>

#include "committee/domain.hpp"
#include "committee/prompts.hpp"
#include "committee/replay.hpp"
#include "committee/scripted_policy.hpp"

namespace committee {

inline constexpr const char* kQueryIdHeader = "X-Committee-Query-Id";
inline constexpr const char* kAttemptHeader = "X-Committee-Attempt";

struct HttpEndpoint {
  std::string base_url;  // e.g. http://127.0.0.1:30000/v1
  std::string model_id;
  std::string auth_token_env;  // name of the variable holding a bearer token; may be empty
  int timeout_ms = 60000;
  int max_retries = 2;
  int backoff_ms = 200;  // first retry delay, doubled per retry
  double temperature = 0.0;
};

struct ScriptedEndpoint {
  ScriptedPolicy policy;
};

struct ReplayEndpoint {
  std::string fixture_path;
  /// Shared preloaded fixture; when set, fixture_path is informational.
  std::shared_ptr<const ReplayFixture> fixture;
};

struct ModelEndpoint {
  std::string name;
  std::variant<HttpEndpoint, ScriptedEndpoint, ReplayEndpoint> kind;

  /// Throws ConfigError when the endpoint is malformed.
  void validate() const;
  std::string_view kind_name() const;
};

/// Per-call routing information; never sent to the model as prompt text.
struct CallContext {
  const Query* query = nullptr;
  int attempt = 1;
};

/// A handle to one endpoint. Safe to call concurrently from many threads.
class ModelClient {
 public:
  explicit ModelClient(ModelEndpoint endpoint,
                       std::shared_ptr<CompletionRecorder> recorder = nullptr);

  ModelClient(const ModelClient&) = delete;
  ModelClient& operator=(const ModelClient&) = delete;

  const ModelEndpoint& endpoint() const { return endpoint_; }
  const std::string& name() const { return endpoint_.name; }

  /// The backend's full completion text. Throws TimeoutError, EndpointError
  /// or ProtocolError; each names this endpoint.
  std::string complete(std::span<const ChatMessage> messages, const CallContext& context) const;

  /// Completions requested so far, including failed ones.
  std::uint64_t call_count() const { return calls_.load(); }

 private:
  std::string complete_http(const HttpEndpoint& http, std::span<const ChatMessage> messages,
                            const CallContext& context) const;

  ModelEndpoint endpoint_;
  std::shared_ptr<const ReplayFixture> replay_;
  std::shared_ptr<CompletionRecorder> recorder_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

/// One-shot convenience over ModelClient.
std::string complete(const ModelEndpoint& endpoint, std::span<const ChatMessage> messages,
                     const CallContext& context);

/// The chat-completions request body for messages.
std::string chat_request_body(const std::string& model, std::span<const ChatMessage> messages,
                              double temperature);

/// Extracts choices[0].message.content; throws ProtocolError naming endpoint.
std::string extract_completion_content(const std::string& endpoint, std::string_view body);

}  // namespace committee
