// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/service/http_server.hpp"

#include "httplib.h"

namespace railgate::service {

struct HttpServer::Impl {
  ChatService& service;
  httplib::Server server;

  explicit Impl(ChatService& s) : service(s) {}

  static void send(httplib::Response& res, const ChatService::Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  }
};

HttpServer::HttpServer(ChatService& service) : impl_(std::make_unique<Impl>(service)) {
  Impl& m = *impl_;
  m.server.Get("/v1/rails/configs", [&m](const httplib::Request&, httplib::Response& res) {
    Impl::send(res, m.service.list_configs());
  });
  m.server.Post("/v1/chat", [&m](const httplib::Request& req, httplib::Response& res) {
    Impl::send(res, m.service.chat(req.body));
  });
  m.server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    Impl::send(res, ChatService::error(500, what));
  });
  m.server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) Impl::send(res, ChatService::error(res.status, "no such route"));
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw BindError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

bool HttpServer::running() const { return impl_->server.is_running(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace railgate::service
