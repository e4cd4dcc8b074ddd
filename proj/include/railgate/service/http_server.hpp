// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "railgate/service/service.hpp"

namespace railgate::service {

class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// HTTP front end for a ChatService. Requests run on the server's worker
/// pool; turns on one session are serialized by the session lock.
class HttpServer {
 public:
  explicit HttpServer(ChatService& service);
  ~HttpServer();

  /// Binds without serving. Port 0 picks a free port; returns the bound port.
  /// Throws BindError.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void serve();
  bool running() const;
  /// Thread-safe; makes serve() return after in-flight requests finish.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace railgate::service
