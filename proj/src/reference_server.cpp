#include <httplib.h>

#include "coherency/errors.hpp"
#include "coherency/http.hpp"

namespace coherency {

using nlohmann::json;

namespace {

class BadRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", {{"code", code}, {"message", message}}}}.dump(),
                  "application/json");
}

json parse_body(const httplib::Request& req) {
  json j;
  try {
    j = json::parse(req.body);
  } catch (const json::exception& e) {
    throw BadRequest(std::string("body is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw BadRequest("body must be a JSON object");
  return j;
}

template <class T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw BadRequest(std::string("missing field \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw BadRequest(std::string("field \"") + key + "\" has the wrong type");
  }
}

// Wraps a handler so every failure becomes a protocol error body.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const BadRequest& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const BackendError& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

ReferenceServer::ReferenceServer(std::shared_ptr<const Backend> backend)
    : backend_(std::move(backend)), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;
  auto backend_ptr = backend_;
  // SO_REUSEADDR only: with httplib's default SO_REUSEPORT a second server
  // could silently share the port.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  srv.Get("/v1/capabilities", guarded([backend_ptr](const httplib::Request&, httplib::Response& res) {
            res.set_content(to_json(backend_ptr->capabilities()).dump(), "application/json");
          }));

  srv.Post("/v1/predict", guarded([backend_ptr](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             PredictRequest pr;
             pr.prompt = field<std::string>(body, "prompt");
             pr.mask_marker = field<std::string>(body, "mask_marker");
             pr.n_best = field<int>(body, "n_best");
             pr.banned = field<std::vector<std::string>>(body, "banned");
             const auto caps = backend_ptr->capabilities();
             if (pr.n_best < 1 || pr.n_best > caps.max_n_best)
               throw BadRequest("n_best outside [1, " + std::to_string(caps.max_n_best) + "]");
             json preds = json::array();
             for (const auto& p : backend_ptr->predict(pr))
               preds.push_back({{"text", p.text}, {"score", p.score}});
             res.set_content(json{{"predictions", preds}}.dump(), "application/json");
           }));

  srv.Post("/v1/score", guarded([backend_ptr](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             const auto prefix = field<std::string>(body, "prompt_prefix");
             const auto candidates = field<std::vector<std::string>>(body, "candidates");
             if (candidates.empty()) throw BadRequest("candidates must be non-empty");
             res.set_content(json{{"scores", backend_ptr->score(prefix, candidates)}}.dump(),
                             "application/json");
           }));

  srv.Post("/v1/token_count", guarded([backend_ptr](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             const auto text = field<std::string>(body, "text");
             res.set_content(json{{"count", backend_ptr->token_count(text)}}.dump(),
                             "application/json");
           }));

  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404)
      send_error(res, 404, "not_found", "no route for " + req.method + " " + req.path);
    else
      send_error(res, res.status, "http_" + std::to_string(res.status), "request failed");
  });
}

ReferenceServer::~ReferenceServer() { stop(); }

void ReferenceServer::bind(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    if (port_ < 0) throw BindError("cannot bind " + host + ":0");
  } else {
    if (!server_->bind_to_port(host, port))
      throw BindError("cannot bind " + host + ":" + std::to_string(port));
    port_ = port;
  }
}

void ReferenceServer::listen() { server_->listen_after_bind(); }

void ReferenceServer::start(const std::string& host, int port) {
  bind(host, port);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void ReferenceServer::stop() {
  if (stopped_.exchange(true)) return;
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string ReferenceServer::url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

std::unique_ptr<ReferenceServer> serve_reference(std::shared_ptr<const SyntheticKB> kb,
                                                 const std::string& host, int port) {
  auto server = std::make_unique<ReferenceServer>(std::make_shared<SyntheticBackend>(std::move(kb)));
  server->start(host, port);
  return server;
}

}  // namespace coherency
