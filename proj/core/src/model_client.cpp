#include "committee/model_client.hpp"

#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "committee/serialization.hpp"

namespace committee {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash, may be empty
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url must include a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) out.prefix = url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

bool is_transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

void ModelEndpoint::validate() const {
  if (name.empty()) throw ConfigError("endpoint name must not be empty");
  std::visit(
      [&](const auto& kind_value) {
        using Kind = std::decay_t<decltype(kind_value)>;
        if constexpr (std::is_same_v<Kind, HttpEndpoint>) {
          if (kind_value.base_url.empty()) throw ConfigError(name + ": base_url is required");
          split_url(kind_value.base_url);
          if (kind_value.model_id.empty()) throw ConfigError(name + ": model is required");
          if (kind_value.timeout_ms <= 0) throw ConfigError(name + ": timeout_ms must be > 0");
          if (kind_value.max_retries < 0) throw ConfigError(name + ": max_retries must be >= 0");
          if (kind_value.backoff_ms < 0) throw ConfigError(name + ": backoff_ms must be >= 0");
        } else if constexpr (std::is_same_v<Kind, ReplayEndpoint>) {
          if (!kind_value.fixture && kind_value.fixture_path.empty()) {
            throw ConfigError(name + ": replay endpoint needs a fixture path");
          }
        } else {
          if (const auto* probabilistic =
                  std::get_if<ProbabilisticPolicy>(&kind_value.policy.mode)) {
            auto check = [&](double p) {
              if (!(p >= 0.0 && p <= 1.0)) {
                throw ConfigError(fmt::format("{}: probability {} outside [0, 1]", name, p));
              }
            };
            check(probabilistic->default_p);
            for (const auto& [category, p] : probabilistic->per_category) check(p);
          }
        }
      },
      kind);
}

std::string_view ModelEndpoint::kind_name() const {
  switch (kind.index()) {
    case 0: return "http";
    case 1: return "scripted";
    default: return "replay";
  }
}

ModelClient::ModelClient(ModelEndpoint endpoint, std::shared_ptr<CompletionRecorder> recorder)
    : endpoint_(std::move(endpoint)), recorder_(std::move(recorder)) {
  endpoint_.validate();
  if (const auto* replay = std::get_if<ReplayEndpoint>(&endpoint_.kind)) {
    replay_ = replay->fixture ? replay->fixture
                              : std::make_shared<const ReplayFixture>(
                                    ReplayFixture::load(replay->fixture_path));
  }
}

std::string ModelClient::complete(std::span<const ChatMessage> messages,
                                  const CallContext& context) const {
  if (messages.empty()) throw ProtocolError(name(), "no messages to send");
  calls_.fetch_add(1);
  const std::string query_id = context.query ? context.query->id() : std::string();

  std::string text = std::visit(
      [&](const auto& kind_value) -> std::string {
        using Kind = std::decay_t<decltype(kind_value)>;
        if constexpr (std::is_same_v<Kind, HttpEndpoint>) {
          return complete_http(kind_value, messages, context);
        } else if constexpr (std::is_same_v<Kind, ScriptedEndpoint>) {
          if (!context.query) throw ProtocolError(name(), "scripted endpoints need a query");
          if (kind_value.policy.latency.count() > 0) {
            std::this_thread::sleep_for(kind_value.policy.latency);
          }
          return scripted_completion(kind_value.policy, *context.query, context.attempt);
        } else {
          auto found = replay_->find({name(), query_id, context.attempt});
          if (!found) {
            throw ProtocolError(name(), fmt::format("no recorded completion for query {} attempt {}",
                                                    query_id, context.attempt));
          }
          return std::move(*found);
        }
      },
      endpoint_.kind);

  if (recorder_) recorder_->record({name(), query_id, context.attempt}, text);
  return text;
}

std::string chat_request_body(const std::string& model, std::span<const ChatMessage> messages,
                              double temperature) {
  Json body;
  body["model"] = model;
  Json list = Json::array();
  for (const auto& message : messages) {
    Json entry;
    entry["role"] = message.role;
    entry["content"] = message.content;
    list.push_back(std::move(entry));
  }
  body["messages"] = std::move(list);
  body["temperature"] = temperature;
  return body.dump();
}

std::string extract_completion_content(const std::string& endpoint, std::string_view body) {
  const auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw ProtocolError(endpoint, "response body is not JSON");
  try {
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw ProtocolError(endpoint, "message content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError(endpoint, "response lacks choices[0].message.content");
  }
}

std::string ModelClient::complete_http(const HttpEndpoint& http,
                                       std::span<const ChatMessage> messages,
                                       const CallContext& context) const {
  const auto url = split_url(http.base_url);
  const std::string path = url.prefix + "/chat/completions";
  const std::string body = chat_request_body(http.model_id, messages, http.temperature);

  httplib::Headers headers;
  if (!http.auth_token_env.empty()) {
    if (const char* token = std::getenv(http.auth_token_env.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  if (context.query) headers.emplace(kQueryIdHeader, context.query->id());
  headers.emplace(kAttemptHeader, std::to_string(context.attempt));

  const auto timeout = std::chrono::milliseconds(http.timeout_ms);
  std::string last_failure;
  bool last_was_timeout = false;
  int last_status = 0;

  for (int attempt = 0; attempt <= http.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(http.backoff_ms) * (1 << (attempt - 1)));
    }
    httplib::Client client(url.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(path, headers, body, "application/json");
    if (!result) {
      const auto error = result.error();
      const bool elapsed_out = std::chrono::steady_clock::now() - started >= timeout;
      last_was_timeout = error == httplib::Error::ConnectionTimeout ||
                         (error == httplib::Error::Read && elapsed_out);
      last_failure = httplib::to_string(error);
      last_status = 0;
      continue;
    }
    if (result->status >= 200 && result->status < 300) {
      return extract_completion_content(name(), result->body);
    }
    last_was_timeout = false;
    last_status = result->status;
    last_failure = fmt::format("HTTP status {}", result->status);
    if (!is_transient_status(result->status)) break;
  }

  if (last_was_timeout) {
    throw TimeoutError(name(), fmt::format("timed out after {} ms ({})", http.timeout_ms,
                                           last_failure));
  }
  if (last_status == 0) {
    throw EndpointError(name(), 0, "request failed: " + last_failure);
  }
  throw EndpointError(name(), last_status, last_failure);
}

std::string complete(const ModelEndpoint& endpoint, std::span<const ChatMessage> messages,
                     const CallContext& context) {
  return ModelClient(endpoint).complete(messages, context);
}

}  // namespace committee
