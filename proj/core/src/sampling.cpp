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

#include "faultloom/sampling.hpp"

#include <algorithm>
#include <set>

#include "faultloom/error.hpp"

namespace faultloom {

std::uint64_t PortableRng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "bound must be positive");
  // Reject the low (2^64 mod bound) values so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t x = engine_();
    if (x >= threshold) return x % bound;
  }
}

namespace {

std::vector<std::size_t> draw(std::vector<std::size_t> stratum, std::size_t count, PortableRng& rng) {
  // Partial Fisher-Yates: the first `count` slots end up a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    auto j = i + static_cast<std::size_t>(rng.below(stratum.size() - i));
    std::swap(stratum[i], stratum[j]);
  }
  stratum.resize(count);
  return stratum;
}

}  // namespace

Corpus sample_balanced(const Corpus& corpus, const GoldSet& gold, const SampleRequest& request) {
  const auto& records = corpus.records();
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto* g = gold.find(records[i].key());
    if (g == nullptr || !g->fault_related) continue;
    (*g->fault_related ? positives : negatives).push_back(i);
  }

  auto shortfall = [](const char* stratum, std::size_t need, std::size_t have) {
    throw Error(ErrorCode::kInsufficientStratum,
                std::string("need ") + std::to_string(need) + " " + stratum + " records, have " +
                    std::to_string(have) + " (short by " + std::to_string(need - have) + ")",
                stratum);
  };
  if (positives.size() < request.n_pos) shortfall("fault-related", request.n_pos, positives.size());
  if (negatives.size() < request.n_neg) shortfall("non-fault", request.n_neg, negatives.size());

  auto by_key = [&](std::size_t a, std::size_t b) { return records[a].key() < records[b].key(); };
  std::sort(positives.begin(), positives.end(), by_key);
  std::sort(negatives.begin(), negatives.end(), by_key);

  PortableRng rng(request.seed);
  auto chosen_pos = draw(std::move(positives), request.n_pos, rng);
  auto chosen_neg = draw(std::move(negatives), request.n_neg, rng);

  std::set<std::size_t> chosen(chosen_pos.begin(), chosen_pos.end());
  chosen.insert(chosen_neg.begin(), chosen_neg.end());
  std::vector<IssueRecord> out;
  out.reserve(chosen.size());
  for (auto i : chosen) out.push_back(records[i]);
  return Corpus(std::move(out), corpus.provenance());
}

}  // namespace faultloom
