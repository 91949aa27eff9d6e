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

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "faultloom/error.hpp"

namespace faultloom {

// Exact non-negative-denominator fraction, always kept in lowest terms so that
// equality is structural.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw Error(ErrorCode::kInvalidArgument, "ratio with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  bool operator==(const Ratio&) const = default;
  std::strong_ordering operator<=>(const Ratio& o) const {
    // Cross-multiplying is safe for the item counts seen here (well below 2^31).
    return num_ * o.den_ <=> o.num_ * den_;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline nlohmann::json to_json(const Ratio& r) {
  return nlohmann::json{{"fraction", r.to_string()}, {"value", r.value()}};
}

}  // namespace faultloom
