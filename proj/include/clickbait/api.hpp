#pragma once

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "clickbait/errors.hpp"
#include "clickbait/model.hpp"
#include "clickbait/rate_limiter.hpp"
#include "clickbait/store.hpp"
#include "clickbait/text.hpp"
#include "clickbait/uuid.hpp"

namespace clickbait {

// Transport-neutral request. Header names are matched case-insensitively.
struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
  std::string remote_addr;
  std::vector<std::pair<std::string, std::string>> headers;

  std::string header(std::string_view name) const {
    for (const auto& [k, v] : headers) {
      if (k.size() == name.size() &&
          std::equal(k.begin(), k.end(), name.begin(), [](char a, char b) {
            return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
          }))
        return v;
    }
    return {};
  }
};

struct HttpResponse {
  int status = 200;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;

  std::string header(std::string_view name) const {
    for (const auto& [k, v] : headers)
      if (k == name) return v;
    return {};
  }
  bool has_header(std::string_view name) const {
    return std::any_of(headers.begin(), headers.end(), [&](const auto& h) { return h.first == name; });
  }
};

struct ServiceConfig {
  std::vector<std::string> allowed_origins;  // "*" admits any origin
  std::uint32_t rate_capacity = 2;
  std::chrono::seconds rate_window{60};
  std::size_t max_text_len = 500;  // code points, measured after normalization
  bool trust_proxy = false;
};

// Injected time sources: `monotonic` drives the limiter, `utc_ms` stamps records.
struct Clock {
  std::function<Millis()> monotonic;
  std::function<std::int64_t()> utc_ms;

  static Clock system() {
    return {[] {
              return std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now().time_since_epoch());
            },
            [] { return utc_now_ms(); }};
  }
};

inline bool is_ip_address(const std::string& s) {
  unsigned char buf[sizeof(struct in6_addr)];
  return inet_pton(AF_INET, s.c_str(), buf) == 1 || inet_pton(AF_INET6, s.c_str(), buf) == 1;
}

// The JSON HTTP facade: /predict, /feedback, /health and CORS preflight.
class ApiService {
 public:
  using UuidSource = std::function<std::string()>;

  ApiService(ServiceConfig config, std::shared_ptr<RecordStore> store, Clock clock = Clock::system(),
             UuidSource uuids = {})
      : config_(std::move(config)),
        store_(std::move(store)),
        clock_(std::move(clock)),
        uuids_(std::move(uuids)),
        limiter_(config_.rate_capacity, std::chrono::duration_cast<Millis>(config_.rate_window)) {
    if (!uuids_) {
      auto gen = std::make_shared<UuidGenerator>();
      uuids_ = [gen] { return (*gen)(); };
    }
  }

  void set_model(std::shared_ptr<const ModelArtifact> model) {
    std::lock_guard lock(model_mu_);
    model_ = std::move(model);
  }

  bool model_loaded() const { return current_model() != nullptr; }

  const ServiceConfig& config() const noexcept { return config_; }
  FixedWindowLimiter& limiter() noexcept { return limiter_; }

  HttpResponse handle(const HttpRequest& req) {
    HttpResponse res = route(req);
    add_cors_origin(req, res);
    return res;
  }

  HttpResponse handle_predict(const HttpRequest& req) {
    auto model = current_model();
    if (!model) return error(503, "model_unavailable", "model is not loaded yet");

    auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) return error(400, "invalid_json", "request body is not valid JSON");
    if (!body.is_object()) return error(400, "invalid_request", "request body must be a JSON object");
    auto text_it = body.find("text");
    if (text_it == body.end() || !text_it->is_string())
      return error(400, "invalid_request", "field 'text' (string) is required");
    const std::string text = text_it->get<std::string>();

    const std::string normalized = normalize(text);
    if (normalized.empty()) return error(422, "empty_text", "text is empty after normalization");
    if (codepoint_count(normalized) > config_.max_text_len)
      return error(422, "text_too_long", "text exceeds " + std::to_string(config_.max_text_len) + " characters");

    const auto key = client_key(req);
    if (!key) return error(400, "invalid_client", "cannot determine client address");
    const RateDecision decision = limiter_.check("/predict|" + *key, clock_.monotonic());
    if (!decision.allowed) {
      HttpResponse res = error(429, "rate_limited",
                               "rate limit of " + std::to_string(config_.rate_capacity) + " requests per " +
                                   std::to_string(config_.rate_window.count()) + " s exceeded");
      res.headers.emplace_back("Retry-After", std::to_string(decision.retry_after_seconds));
      return res;
    }

    const Prediction prediction = classify(*model, text);
    PredictionRecord rec{uuids_(), text, prediction.score, prediction.label, *key, clock_.utc_ms()};
    try {
      store_->insert_request(rec);
    } catch (const std::exception& e) {
      return error(500, "storage_error", e.what());
    }
    return json_response(
        200, {{"id", rec.uuid}, {"prediction", prediction.score}, {"label", std::string(to_string(prediction.label))}});
  }

  HttpResponse handle_feedback(const HttpRequest& req) {
    auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) return error(400, "invalid_json", "request body is not valid JSON");
    if (!body.is_object()) return error(400, "invalid_request", "request body must be a JSON object");
    auto id_it = body.find("id");
    auto correct_it = body.find("correct");
    if (id_it == body.end() || !id_it->is_string() || !is_uuid(id_it->get<std::string>()))
      return error(400, "invalid_request", "field 'id' must be a prediction UUID");
    if (correct_it == body.end() || !correct_it->is_boolean())
      return error(400, "invalid_request", "field 'correct' (boolean) is required");

    const std::string id = id_it->get<std::string>();
    try {
      store_->insert_feedback({id, correct_it->get<bool>(), clock_.utc_ms()});
    } catch (const NotFoundError& e) {
      return error(404, "unknown_prediction", e.what());
    } catch (const ConflictError& e) {
      return error(409, "duplicate_feedback", e.what());
    } catch (const std::exception& e) {
      return error(500, "storage_error", e.what());
    }
    return json_response(200, {{"id", id}, {"status", "recorded"}});
  }

  // Never touches the limiter.
  HttpResponse handle_preflight(const HttpRequest& req) {
    HttpResponse res;
    res.status = 204;
    add_cors_origin(req, res);
    if (origin_allowed(req.header("Origin"))) {
      res.headers.emplace_back("Access-Control-Allow-Methods", "POST, OPTIONS");
      res.headers.emplace_back("Access-Control-Allow-Headers", "Content-Type");
      res.headers.emplace_back("Access-Control-Max-Age", "600");
    }
    return res;
  }

  HttpResponse handle_health() const {
    return json_response(200, {{"status", "ok"}, {"model_loaded", model_loaded()}});
  }

 private:
  HttpResponse route(const HttpRequest& req) {
    const bool is_options = req.method == "OPTIONS";
    if (req.path == "/predict" || req.path == "/feedback") {
      if (is_options) return handle_preflight(req);
      if (req.method != "POST") return method_not_allowed("POST, OPTIONS");
      return req.path == "/predict" ? handle_predict(req) : handle_feedback(req);
    }
    if (req.path == "/health") {
      if (is_options) return handle_preflight(req);
      if (req.method != "GET" && req.method != "HEAD") return method_not_allowed("GET, OPTIONS");
      return handle_health();
    }
    return error(404, "not_found", "no route for " + req.path);
  }

  std::shared_ptr<const ModelArtifact> current_model() const {
    std::lock_guard lock(model_mu_);
    return model_;
  }

  std::optional<std::string> client_key(const HttpRequest& req) const {
    if (config_.trust_proxy) {
      std::string fwd = req.header("X-Forwarded-For");
      fwd = fwd.substr(0, fwd.find(','));
      const auto b = fwd.find_first_not_of(" \t");
      const auto e = fwd.find_last_not_of(" \t");
      if (b != std::string::npos) {
        std::string first = fwd.substr(b, e - b + 1);
        if (is_ip_address(first)) return first;
      }
    }
    if (is_ip_address(req.remote_addr)) return req.remote_addr;
    return std::nullopt;
  }

  bool origin_allowed(const std::string& origin) const {
    if (origin.empty()) return false;
    return std::any_of(config_.allowed_origins.begin(), config_.allowed_origins.end(),
                       [&](const std::string& o) { return o == "*" || o == origin; });
  }

  void add_cors_origin(const HttpRequest& req, HttpResponse& res) const {
    const std::string origin = req.header("Origin");
    if (origin_allowed(origin) && !res.has_header("Access-Control-Allow-Origin")) {
      res.headers.emplace_back("Access-Control-Allow-Origin", origin);
      res.headers.emplace_back("Vary", "Origin");
    }
  }

  static HttpResponse json_response(int status, const nlohmann::json& body) {
    HttpResponse res;
    res.status = status;
    res.headers.emplace_back("Content-Type", "application/json");
    res.body = body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    return res;
  }

  static HttpResponse error(int status, std::string_view code, std::string_view message) {
    return json_response(status, {{"error", code}, {"message", message}});
  }

  static HttpResponse method_not_allowed(const char* allow) {
    HttpResponse res = error(405, "method_not_allowed", "method not allowed");
    res.headers.emplace_back("Allow", allow);
    return res;
  }

  ServiceConfig config_;
  std::shared_ptr<RecordStore> store_;
  Clock clock_;
  UuidSource uuids_;
  FixedWindowLimiter limiter_;
  mutable std::mutex model_mu_;
  std::shared_ptr<const ModelArtifact> model_;
};

}  // namespace clickbait
