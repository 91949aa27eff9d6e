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
#include <string>
#include <string_view>

namespace faultloom {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

// Accepts "YYYY-MM-DDTHH:MM:SS[.frac](Z|±HH:MM)"; fractions are truncated and
// offsets folded into UTC. Throws Error(kMalformedRecord) otherwise.
Timestamp parse_rfc3339(std::string_view text);
std::string format_rfc3339(Timestamp ts);

// "YYYY-MM-DD", validated as a real calendar date.
Date parse_date(std::string_view text);
std::string format_date(Date d);

inline Date date_of(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

}  // namespace faultloom
