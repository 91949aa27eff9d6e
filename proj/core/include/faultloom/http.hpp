// Copyright 2026 The FaultLoom Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <map>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace faultloom {

struct HttpRequest {
  std::string method = "GET";
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
};

struct HttpResponse {
  int status = 0;
  std::map<std::string, std::string> headers;  // names lowercased
  std::string body;

  const std::string* header(std::string_view name) const;
};

// Minimal synchronous transport. Implementations throw Error(kNetwork) when no
// HTTP response could be obtained at all; any status code is returned as-is.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

// Real network transport (cpp-httplib, HTTPS via OpenSSL).
class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds{120});
  HttpResponse send(const HttpRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

// Caps the number of in-flight requests through a shared inner transport.
class BoundedTransport final : public HttpTransport {
 public:
  BoundedTransport(HttpTransport& inner, std::ptrdiff_t max_in_flight);
  HttpResponse send(const HttpRequest& request) override;

 private:
  HttpTransport& inner_;
  std::counting_semaphore<> slots_;
};

// Parses an RFC 8288 Link header into rel -> url.
std::map<std::string, std::string> parse_link_header(std::string_view value);

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string target;  // path?query
};
UrlParts split_url(std::string_view url);

}  // namespace faultloom
