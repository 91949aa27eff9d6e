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

#include "faultloom/time.hpp"

#include <cstdio>

#include "faultloom/error.hpp"

namespace faultloom {

namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    value = value * 10 + (s[i] - '0');
  }
  out = value;
  return true;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  throw Error(ErrorCode::kMalformedRecord, "not an RFC 3339 timestamp: '" + std::string(text) + "'",
              std::string(text));
}

bool make_date(int y, int m, int d, Date& out) {
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  out = std::chrono::sys_days{ymd};
  return true;
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  int y, mo, d, h, mi, s;
  if (text.size() < 20 || !read_digits(text, 0, 4, y) || text[4] != '-' || !read_digits(text, 5, 2, mo) ||
      text[7] != '-' || !read_digits(text, 8, 2, d) || (text[10] != 'T' && text[10] != 't') ||
      !read_digits(text, 11, 2, h) || text[13] != ':' || !read_digits(text, 14, 2, mi) || text[16] != ':' ||
      !read_digits(text, 17, 2, s)) {
    bad_timestamp(text);
  }
  Date day;
  if (!make_date(y, mo, d, day) || h > 23 || mi > 59 || s > 60) bad_timestamp(text);

  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == start) bad_timestamp(text);
  }
  std::chrono::seconds offset{0};
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    int oh, om;
    if (!read_digits(text, pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
        !read_digits(text, pos + 4, 2, om) || oh > 23 || om > 59) {
      bad_timestamp(text);
    }
    offset = std::chrono::hours{oh} + std::chrono::minutes{om};
    if (text[pos] == '-') offset = -offset;
    pos += 6;
  } else {
    bad_timestamp(text);
  }
  if (pos != text.size()) bad_timestamp(text);

  return Timestamp{day.time_since_epoch()} + std::chrono::hours{h} + std::chrono::minutes{mi} +
         std::chrono::seconds{s} - offset;
}

std::string format_rfc3339(Timestamp ts) {
  auto day = std::chrono::floor<std::chrono::days>(ts);
  std::chrono::year_month_day ymd{day};
  std::chrono::hh_mm_ss tod{ts - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

Date parse_date(std::string_view text) {
  int y, m, d;
  Date out;
  if (text.size() != 10 || !read_digits(text, 0, 4, y) || text[4] != '-' || !read_digits(text, 5, 2, m) ||
      text[7] != '-' || !read_digits(text, 8, 2, d) || !make_date(y, m, d, out)) {
    throw Error(ErrorCode::kInvalidArgument, "not a calendar date (YYYY-MM-DD): '" + std::string(text) + "'",
                std::string(text));
  }
  return out;
}

std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace faultloom
