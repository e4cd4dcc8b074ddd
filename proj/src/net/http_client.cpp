// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#include "railgate/net/http_client.hpp"

#include <regex>
#include <stdexcept>

#include "httplib.h"
#include "railgate/errors.hpp"

namespace railgate::net {

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

Url parse_url(const std::string& url) {
  static const std::regex kPattern(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kPattern)) throw std::invalid_argument("invalid URL: " + url);
  Url out;
  out.scheme = m[1];
  out.host = m[2];
  out.port = m[3].matched ? std::stoi(m[3]) : (out.scheme == "https" ? 443 : 80);
  out.path = m[4].matched ? std::string(m[4]) : "/";
  return out;
}

bool is_retryable_status(int status) { return status == 429 || status >= 500; }

HttpResult post_json(const Url& url, const std::string& body,
                     const std::vector<std::pair<std::string, std::string>>& headers,
                     std::chrono::milliseconds timeout) {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.scheme == "https") throw ProviderError("https endpoints need a build with OpenSSL", false);
#endif
  httplib::Client client(url.origin());
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(url.path, h, body, "application/json");
  if (!res) {
    throw ProviderError("request to " + url.origin() + url.path + " failed: " + httplib::to_string(res.error()),
                        /*retryable=*/true);
  }
  return HttpResult{res->status, res->body};
}

}  // namespace railgate::net
