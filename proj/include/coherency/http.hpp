#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "coherency/backend.hpp"
#include "coherency/synthetic.hpp"

namespace httplib {
class Server;
}

namespace coherency {

struct RetryPolicy {
  int attempts = 3;
  int initial_backoff_ms = 50;  // doubled after each failed attempt
};

// Client for the JSON-over-HTTP inference protocol. Each request uses its own
// connection, so one instance may be shared across threads.
class HttpBackend final : public Backend {
 public:
  // base_url like "http://127.0.0.1:8080"
  explicit HttpBackend(std::string base_url, RetryPolicy retry = {}, int timeout_s = 30);

  BackendCapabilities capabilities() const override;
  std::vector<Prediction> predict(const PredictRequest& request) const override;
  std::vector<double> score(std::string_view prompt_prefix,
                            std::span<const std::string> candidates) const override;
  int token_count(std::string_view text) const override;
  std::string identity() const override { return base_url_; }

 private:
  nlohmann::json call(const std::string& method, const std::string& path,
                      const nlohmann::json* body) const;

  std::string base_url_;
  RetryPolicy retry_;
  int timeout_s_;
  mutable std::once_flag caps_once_;
  mutable std::optional<BackendCapabilities> caps_;
};

class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Serves any Backend over the wire protocol.
class ReferenceServer {
 public:
  explicit ReferenceServer(std::shared_ptr<const Backend> backend);
  ~ReferenceServer();
  ReferenceServer(const ReferenceServer&) = delete;
  ReferenceServer& operator=(const ReferenceServer&) = delete;

  // Binds (port 0 picks a free port) and starts serving on a background thread.
  void start(const std::string& host, int port);
  // Blocks serving on the calling thread after a successful bind.
  void bind(const std::string& host, int port);
  void listen();
  // Idempotent.
  void stop();

  int port() const { return port_; }
  std::string url() const;

 private:
  std::shared_ptr<const Backend> backend_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = -1;
  std::atomic<bool> stopped_{false};
};

std::unique_ptr<ReferenceServer> serve_reference(std::shared_ptr<const SyntheticKB> kb,
                                                 const std::string& host, int port);

}  // namespace coherency
