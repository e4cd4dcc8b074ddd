// Copyright 2026 The Railgate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace railgate::net {

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;  // starts with '/'

  std::string origin() const;
};

/// Throws std::invalid_argument on anything that is not http(s)://host[:port][/path].
Url parse_url(const std::string& url);

struct HttpResult {
  int status = 0;
  std::string body;
};

/// POSTs a JSON body. Transport failures and timeouts throw ProviderError
/// (retryable); non-2xx statuses are returned for the caller to map.
HttpResult post_json(const Url& url, const std::string& body,
                     const std::vector<std::pair<std::string, std::string>>& headers,
                     std::chrono::milliseconds timeout);

/// 429 and 5xx are retryable; other non-2xx statuses are not.
bool is_retryable_status(int status);

}  // namespace railgate::net
