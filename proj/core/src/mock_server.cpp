#include "committee/mock_server.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <httplib.h>

#include "committee/benchmark.hpp"
#include "committee/model_client.hpp"
#include "committee/serialization.hpp"

namespace committee {

namespace {

Json error_body(std::string_view message, std::string_view type) {
  Json error;
  error["message"] = message;
  error["type"] = type;
  Json body;
  body["error"] = std::move(error);
  return body;
}

// Rebuilds a query from the question block a prompt embeds, for requests
// whose id is not in the mock's corpus.
Query query_from_messages(const std::string& id, const nlohmann::json& messages) {
  for (const auto& message : messages) {
    if (message.value("role", "") != "user" || !message.contains("content")) continue;
    const std::string content = message.at("content").get<std::string>();
    for (std::size_t open = content.find('{'); open != std::string::npos;
         open = content.find('{', open + 1)) {
      const std::size_t close = content.find("\n}", open);
      if (close == std::string::npos) break;
      auto block = nlohmann::json::parse(content.substr(open, close + 2 - open), nullptr, false);
      if (block.is_discarded() || !block.is_object() || !block.contains("question")) continue;
      std::vector<std::string> options;
      for (int i = 1; block.contains(fmt::format("option {}", i)); ++i) {
        options.push_back(block.at(fmt::format("option {}", i)).get<std::string>());
      }
      const auto text = block.at("question").get<std::string>();
      if (options.empty()) return Query::free_form(id, text);
      return Query::multiple_choice(id, text, options);
    }
  }
  return Query::free_form(id, "");
}

}  // namespace

MockPolicySet mock_policies_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("mock policy file must be an object");
  MockPolicySet set;
  if (doc.contains("models")) {
    if (!doc.at("models").is_object()) throw ConfigError("mock models must be an object");
    for (const auto& [model, policy] : doc.at("models").items()) {
      try {
        set.models.emplace(model, scripted_policy_from_json(policy));
      } catch (const ConfigError& e) {
        throw ConfigError(model + ": " + e.what());
      }
    }
  }
  if (doc.contains("default")) set.fallback = scripted_policy_from_json(doc.at("default"));
  if (doc.contains("corpus")) {
    std::filesystem::path corpus = doc.at("corpus").get<std::string>();
    if (corpus.is_relative() && !base_dir.empty()) corpus = base_dir / corpus;
    try {
      for (auto& query : load_corpus(corpus)) set.corpus.emplace(query.id(), std::move(query));
    } catch (const IngestError& e) {
      throw ConfigError(std::string("mock corpus: ") + e.what());
    }
  }
  if (set.models.empty() && !set.fallback) throw ConfigError("mock policy file defines no models");
  return set;
}

MockPolicySet load_mock_policies(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open mock policy file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Json doc;
  try {
    doc = Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
  return mock_policies_from_json(doc, path.parent_path());
}

MockServer::MockServer(MockPolicySet policies)
    : policies_(std::move(policies)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

MockServer::~MockServer() { stop(); }

void MockServer::install_routes() {
  auto handler = [this](const httplib::Request& request, httplib::Response& response) {
    requests_.fetch_add(1);
    const auto body = nlohmann::json::parse(request.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("messages") ||
        !body.at("messages").is_array() || !body.contains("model")) {
      response.status = 400;
      response.set_content(error_body("request needs model and messages", "invalid_request_error")
                               .dump(),
                           "application/json");
      return;
    }
    const std::string model = body.at("model").get<std::string>();
    const ScriptedPolicy* policy = nullptr;
    if (const auto it = policies_.models.find(model); it != policies_.models.end()) {
      policy = &it->second;
    } else if (policies_.fallback) {
      policy = &*policies_.fallback;
    }
    if (!policy) {
      response.status = 404;
      response.set_content(error_body("model " + model + " does not exist", "not_found").dump(),
                           "application/json");
      return;
    }

    const std::string query_id = request.get_header_value(kQueryIdHeader);
    int attempt = 1;
    if (request.has_header(kAttemptHeader)) {
      try {
        attempt = std::stoi(request.get_header_value(kAttemptHeader));
      } catch (const std::exception&) {
        attempt = 1;
      }
    }
    const auto known = policies_.corpus.find(query_id);
    const Query query = known != policies_.corpus.end()
                            ? known->second
                            : query_from_messages(query_id, body.at("messages"));

    if (policy->latency.count() > 0) std::this_thread::sleep_for(policy->latency);
    const std::string content = scripted_completion(*policy, query, attempt);

    Json message;
    message["role"] = "assistant";
    message["content"] = content;
    Json choice;
    choice["index"] = 0;
    choice["message"] = std::move(message);
    choice["finish_reason"] = "stop";
    Json reply;
    reply["id"] = fmt::format("chatcmpl-{:016x}", fnv1a64(model + "/" + query_id + "/" +
                                                          std::to_string(attempt)));
    reply["object"] = "chat.completion";
    reply["model"] = model;
    reply["choices"] = Json::array({std::move(choice)});
    response.set_content(reply.dump(), "application/json");
  };
  server_->Post("/chat/completions", handler);
  server_->Post("/v1/chat/completions", handler);
}

int MockServer::start(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) throw Error(fmt::format("mock server cannot bind {}:{}", host, port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockServer::serve_forever(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port)) {
    throw Error(fmt::format("mock server cannot listen on {}:{}", host, port));
  }
}

void MockServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockServer::base_url() const { return fmt::format("http://{}:{}/v1", host_, port_); }

}  // namespace committee
