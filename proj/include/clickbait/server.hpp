#pragma once

#include <sys/socket.h>

#include <cstddef>
#include <string>

#include "httplib.h"

#include "clickbait/api.hpp"

namespace clickbait {

inline constexpr std::size_t kMaxRequestBody = 64 * 1024;

// Binds an ApiService to a cpp-httplib server. Every method and path is
// routed through ApiService::handle (HEAD is served by the GET route).
class HttpServer {
 public:
  explicit HttpServer(ApiService& service) : service_(service) {
    server_.set_payload_max_length(kMaxRequestBody);
    // httplib defaults to SO_REUSEPORT, which would let a second server share
    // an occupied port instead of failing to bind.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    const auto handler = [this](const httplib::Request& req, httplib::Response& res) { dispatch(req, res); };
    const char* any = ".*";
    server_.Get(any, handler);
    server_.Post(any, handler);
    server_.Put(any, handler);
    server_.Patch(any, handler);
    server_.Delete(any, handler);
    server_.Options(any, handler);
  }

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks an ephemeral port. Returns false when the address is unavailable.
  bool bind(const std::string& host, int port) {
    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
      return port_ > 0;
    }
    if (!server_.bind_to_port(host, port)) return false;
    port_ = port;
    return true;
  }

  int port() const noexcept { return port_; }

  // Blocks until stop() is called.
  bool listen() { return server_.listen_after_bind(); }

  void stop() { server_.stop(); }

  void wait_until_ready() const { server_.wait_until_ready(); }

 private:
  void dispatch(const httplib::Request& req, httplib::Response& res) {
    HttpRequest in;
    in.method = req.method;
    in.path = req.path;
    in.body = req.body;
    in.remote_addr = req.remote_addr;
    for (const auto& [k, v] : req.headers) in.headers.emplace_back(k, v);

    const HttpResponse out = service_.handle(in);
    res.status = out.status;
    std::string content_type = "text/plain";
    for (const auto& [k, v] : out.headers) {
      if (k == "Content-Type") content_type = v;
      else res.set_header(k, v);
    }
    if (!out.body.empty()) res.set_content(out.body, content_type);
  }

  ApiService& service_;
  httplib::Server server_;
  int port_ = 0;
};

}  // namespace clickbait
