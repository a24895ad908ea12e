#include <chrono>
#include <thread>

#include <httplib.h>

#include "coherency/errors.hpp"
#include "coherency/http.hpp"
#include "coherency/text.hpp"

namespace coherency {

using nlohmann::json;

HttpBackend::HttpBackend(std::string base_url, RetryPolicy retry, int timeout_s)
    : base_url_(std::move(base_url)), retry_(retry), timeout_s_(timeout_s) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

json HttpBackend::call(const std::string& method, const std::string& path, const json* body) const {
  std::string last_error;
  int backoff = retry_.initial_backoff_ms;
  for (int attempt = 1; attempt <= retry_.attempts; ++attempt) {
    httplib::Client cli(base_url_);
    cli.set_connection_timeout(timeout_s_, 0);
    cli.set_read_timeout(timeout_s_, 0);
    cli.set_write_timeout(timeout_s_, 0);
    httplib::Result res = method == "GET"
                              ? cli.Get(path)
                              : cli.Post(path, body->dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status >= 200 && res->status < 300) {
      try {
        return json::parse(res->body);
      } catch (const json::exception& e) {
        throw BackendError(path + ": malformed response: " + e.what());
      }
    } else {
      std::string code = "http_" + std::to_string(res->status), message = res->body;
      try {
        const json err = json::parse(res->body).at("error");
        code = err.at("code").get<std::string>();
        message = err.at("message").get<std::string>();
      } catch (const json::exception&) {
      }
      last_error = path + ": " + code + ": " + message;
      // client errors are not transient
      if (res->status >= 400 && res->status < 500) throw BackendError(last_error);
    }
    if (attempt < retry_.attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  throw BackendError(base_url_ + path + " failed after " + std::to_string(retry_.attempts) +
                     " attempts: " + last_error);
}

BackendCapabilities HttpBackend::capabilities() const {
  std::call_once(caps_once_, [&] { caps_ = capabilities_from_json(call("GET", "/v1/capabilities", nullptr)); });
  return *caps_;
}

std::vector<Prediction> HttpBackend::predict(const PredictRequest& request) const {
  const json body = {{"prompt", request.prompt},
                     {"mask_marker", request.mask_marker},
                     {"n_best", request.n_best},
                     {"banned", request.banned}};
  const json res = call("POST", "/v1/predict", &body);
  std::vector<Prediction> out;
  try {
    for (const auto& p : res.at("predictions")) {
      const int rank = static_cast<int>(out.size()) + 1;
      out.push_back({p.at("text").get<std::string>(), p.at("score").get<double>(), rank});
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("/v1/predict: malformed response: ") + e.what());
  }
  if (!capabilities().supports_banning) {
    std::set<std::string> banned;
    for (const auto& b : request.banned) banned.insert(normalize_entity(b));
    std::erase_if(out, [&](const Prediction& p) { return banned.count(normalize_entity(p.text)) > 0; });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  }
  return out;
}

std::vector<double> HttpBackend::score(std::string_view prompt_prefix,
                                       std::span<const std::string> candidates) const {
  const json body = {{"prompt_prefix", prompt_prefix},
                     {"candidates", std::vector<std::string>(candidates.begin(), candidates.end())}};
  const json res = call("POST", "/v1/score", &body);
  try {
    return res.at("scores").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("/v1/score: malformed response: ") + e.what());
  }
}

int HttpBackend::token_count(std::string_view text) const {
  const json body = {{"text", text}};
  const json res = call("POST", "/v1/token_count", &body);
  try {
    return res.at("count").get<int>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("/v1/token_count: malformed response: ") + e.what());
  }
}

}  // namespace coherency
