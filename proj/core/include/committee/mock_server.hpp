// An OpenAI-compatible chat-completions server backed by scripted policies,
// for black-box tests of the real HTTP client path.
//
// Policy file:
//   {"corpus": "corpus.json",              optional, resolves query ids
//    "models": {"qwen": {policy...}, ...},  keyed by the request's "model"
//    "default": {policy...}}                optional, for unknown models
//
// The query is identified by the X-Committee-Query-Id header and looked up in
// the corpus; without a match the question block embedded in the prompt is
// parsed instead. X-Committee-Attempt selects the scripted draft.

#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "committee/domain.hpp"
#include "committee/scripted_policy.hpp"

namespace httplib {
class Server;
}

namespace committee {

struct MockPolicySet {
  std::map<std::string, ScriptedPolicy> models;
  std::optional<ScriptedPolicy> fallback;
  std::map<std::string, Query> corpus;
};

/// Throws ConfigError.
MockPolicySet load_mock_policies(const std::filesystem::path& path);
MockPolicySet mock_policies_from_json(const nlohmann::ordered_json& doc,
                                      const std::filesystem::path& base_dir = {});

class MockServer {
 public:
  explicit MockServer(MockPolicySet policies);
  ~MockServer();

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  /// Binds host:port (port 0 picks a free one) and serves on a background
  /// thread. Returns the bound port. Throws Error when binding fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread until stop() is called elsewhere.
  void serve_forever(const std::string& host, int port);
  void stop();

  int port() const { return port_; }
  std::string base_url() const;
  std::uint64_t request_count() const { return requests_.load(); }

 private:
  void install_routes();

  MockPolicySet policies_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = 0;
  std::atomic<std::uint64_t> requests_{0};
};

}  // namespace committee
