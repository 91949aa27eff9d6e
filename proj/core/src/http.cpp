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

#include "faultloom/http.hpp"

#include <httplib.h>

#include "faultloom/error.hpp"
#include "faultloom/text.hpp"

namespace faultloom {

const std::string* HttpResponse::header(std::string_view name) const {
  auto it = headers.find(text::lower(name));
  return it == headers.end() ? nullptr : &it->second;
}

UrlParts split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "not an absolute URL: " + std::string(url), std::string(url));
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

HttplibTransport::HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
  auto parts = split_url(request.url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  client.set_follow_location(true);

  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [k, v] : request.headers) {
    if (text::iequals(k, "content-type")) {
      content_type = v;
    } else {
      headers.emplace(k, v);
    }
  }

  httplib::Result result = request.method == "POST"
                               ? client.Post(parts.target, headers, request.body, content_type)
                               : client.Get(parts.target, headers);
  if (!result) {
    throw Error(ErrorCode::kNetwork,
                request.method + " " + request.url + " failed: " + httplib::to_string(result.error()), request.url);
  }
  HttpResponse response;
  response.status = result->status;
  response.body = result->body;
  for (const auto& [k, v] : result->headers) response.headers[text::lower(k)] = v;
  return response;
}

BoundedTransport::BoundedTransport(HttpTransport& inner, std::ptrdiff_t max_in_flight)
    : inner_(inner), slots_(max_in_flight) {
  if (max_in_flight < 1) throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be >= 1");
}

HttpResponse BoundedTransport::send(const HttpRequest& request) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{slots_};
  return inner_.send(request);
}

std::map<std::string, std::string> parse_link_header(std::string_view value) {
  // <https://x?page=2>; rel="next", <https://x?page=5>; rel="last"
  std::map<std::string, std::string> links;
  std::size_t pos = 0;
  while (pos < value.size()) {
    auto open = value.find('<', pos);
    if (open == std::string_view::npos) break;
    auto close = value.find('>', open);
    if (close == std::string_view::npos) break;
    auto url = value.substr(open + 1, close - open - 1);
    auto next_entry = value.find(',', close);
    auto params = value.substr(close + 1, next_entry == std::string_view::npos ? std::string_view::npos
                                                                               : next_entry - close - 1);
    auto rel_pos = params.find("rel=");
    if (rel_pos != std::string_view::npos) {
      auto rel = text::trim(params.substr(rel_pos + 4));
      if (auto semi = rel.find(';'); semi != std::string_view::npos) rel = text::trim(rel.substr(0, semi));
      if (rel.size() >= 2 && rel.front() == '"' && rel.back() == '"') rel = rel.substr(1, rel.size() - 2);
      // rel may carry several space-separated relation types
      std::size_t s = 0;
      while (s < rel.size()) {
        auto e = rel.find(' ', s);
        if (e == std::string_view::npos) e = rel.size();
        if (e > s) links[std::string(rel.substr(s, e - s))] = std::string(url);
        s = e + 1;
      }
    }
    if (next_entry == std::string_view::npos) break;
    pos = next_entry + 1;
  }
  return links;
}

}  // namespace faultloom
