// A bare chat-completions server whose handler is supplied by the test.

#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include <httplib.h>

#include "committee/serialization.hpp"

namespace committee::testing {

class StubServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit StubServer(Handler handler) {
    server_.Post("/v1/chat/completions",
                 [this, handler](const httplib::Request& req, httplib::Response& res) {
                   ++hits_;
                   handler(req, res);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int hits() const { return hits_.load(); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
};

inline std::string completion_body(const std::string& content) {
  Json message{{"role", "assistant"}, {"content", content}};
  Json choice{{"index", 0}, {"message", message}};
  Json body{{"choices", Json::array({choice})}};
  return body.dump();
}

}  // namespace committee::testing
